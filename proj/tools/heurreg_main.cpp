// Command-line front end: generate model documents, trace rule functionals,
// select regularization parameters, verify structural conditions, and run
// convergence-rate studies.  Exit codes: 0 success, 1 invalid input or usage,
// 2 a requested pass/fail verification failed.

#include "heurreg/conditions.hpp"
#include "heurreg/errors.hpp"
#include "heurreg/experiments.hpp"
#include "heurreg/functionals.hpp"
#include "heurreg/io.hpp"
#include "heurreg/parallel.hpp"
#include "heurreg/selection.hpp"
#include "heurreg/spectral_model.hpp"
#include "heurreg/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace heurreg;

// flags shared by every subcommand that needs a problem/noise instance
struct ModelFlags {
    ModelDocument doc;
    std::string input_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--gamma", doc.gamma,
                        "eigenvalue decay exponent γ: lambda_i = i^(-γ)")
            ->capture_default_str();
        cmd->add_option("--n", doc.n, "problem dimension N")->capture_default_str();
        cmd->add_option("--mu", doc.mu,
                        "solution smoothness μ: xdag_i = lambda_i^μ omega_i")
            ->capture_default_str();
        cmd->add_option("--s", doc.s, "source decay exponent s: omega_i = i^(-s/2)")
            ->capture_default_str();
        cmd->add_option("--beta", doc.beta,
                        "noise decay exponent β: |e_i| = sqrt(tau) i^(-β/2)")
            ->capture_default_str();
        cmd->add_option("--tau", doc.tau, "noise magnitude scale tau")->capture_default_str();
        cmd->add_option("--signs", signs_name, "noise sign pattern: alternating | seeded_random")
            ->capture_default_str();
        cmd->add_option("--seed", doc.seed, "seed for the seeded_random sign pattern")
            ->capture_default_str();
        cmd->add_option("--p", doc.p, "weak noise-norm exponent p in [0, 1/2]")
            ->capture_default_str();
        cmd->add_option("--eta", eta, "rescale the noise to weak norm η");
        cmd->add_option("--input", input_path,
                        "read the model document from this JSON file instead of flags");
    }

    ModelDocument resolve() const {
        ModelDocument resolved = doc;
        if (!input_path.empty()) {
            std::ifstream in(input_path);
            if (!in) throw parameter_error("cannot open model document: " + input_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            resolved = model_from_json_text(buffer.str());
        } else {
            resolved.signs = sign_pattern_from_string(signs_name);
            if (eta) resolved.eta = eta;
        }
        return resolved;
    }

private:
    std::string signs_name = "alternating";
    std::optional<double> eta;
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("cannot open output file: " + path);
    out << content;
}

std::string model_echo(const ModelDocument& doc) {
    // compact echo: regeneration parameters only, arrays elided
    ModelDocument flat = doc;
    flat.eigenvalues.clear();
    flat.solution.clear();
    flat.source.clear();
    flat.noise_coefficients.clear();
    return model_to_json(flat);
}

int cmd_problem(const ModelFlags& flags, const std::string& output, bool arrays) {
    ModelDocument doc = flags.resolve();
    auto [problem, noise] = realize_model(doc);
    if (arrays) {
        ModelDocument full = document_of(problem, noise);
        write_output(output, model_to_json(full) + "\n");
    } else {
        write_output(output, model_to_json(doc) + "\n");
    }
    return 0;
}

int cmd_psi_curve(const ModelFlags& flags, double q, std::size_t count,
                  std::optional<double> alpha_min, unsigned workers,
                  const std::string& output) {
    ModelDocument doc = flags.resolve();
    auto [problem, noise] = realize_model(doc);

    std::vector<double> data(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i)
        data[i] = problem.exact_data[i] + noise.coefficients[i];

    AlphaGrid grid = make_alpha_grid(problem, count, alpha_min);
    double q_eff = q < 0 ? doc.p : q; // default q = p
    RuleSpec qo = make_rule(RuleKind::QO, std::nullopt, doc.p);
    RuleSpec hd = make_rule(RuleKind::HD, q_eff, doc.p);
    RuleSpec hr = make_rule(RuleKind::HR, q_eff, doc.p);
    RuleSpec pms = make_rule(RuleKind::PMS, std::nullopt, doc.p);
    RuleSpec gcv = make_rule(RuleKind::GCV, std::nullopt, doc.p);

    auto c_qo = psi_curve(qo, problem, data, grid, workers);
    auto c_hd = psi_curve(hd, problem, data, grid, workers);
    auto c_hr = psi_curve(hr, problem, data, grid, workers);
    auto c_pms = psi_curve(pms, problem, data, grid, workers);
    auto c_gcv = psi_curve(gcv, problem, data, grid, workers);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double a = grid.points[k];
        ErrorMetrics m = error_metrics(problem, noise, a);
        rows.push_back({format_double(a), format_double(c_qo[k]), format_double(c_hd[k]),
                        format_double(c_hr[k]), format_double(c_pms[k]),
                        format_double(c_gcv[k]), format_double(rho(problem, a)),
                        format_double(m.err_x)});
    }

    nlohmann::json extra;
    extra["model"] = nlohmann::json::parse(model_echo(doc));
    extra["q"] = q_eff;
    extra["count"] = count;
    extra["alpha_min"] = alpha_min ? nlohmann::json(*alpha_min) : nlohmann::json(nullptr);
    write_output(output,
                 csv_document(extra.dump(),
                              {"alpha", "psi_QO", "psi_HD", "psi_HR", "psi_PMS", "psi_GCV",
                               "rho", "err_x"},
                              rows));
    return 0;
}

int cmd_select(const ModelFlags& flags, const std::string& rule_name,
               std::optional<double> q, std::size_t count,
               std::optional<double> alpha_min, unsigned workers,
               const std::string& output) {
    ModelDocument doc = flags.resolve();
    RuleKind kind = rule_kind_from_string(rule_name);
    RuleSpec rule = make_rule(kind, q, doc.p);

    auto [problem, noise] = realize_model(doc);
    std::vector<double> data(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i)
        data[i] = problem.exact_data[i] + noise.coefficients[i];

    AlphaGrid grid = make_alpha_grid(problem, count, alpha_min);
    SelectionResult sel = select_alpha(rule, problem, data, grid, workers);
    ErrorMetrics m = error_metrics(problem, noise, sel.alpha_star);

    nlohmann::json j;
    j["version"] = std::string(k_version_line);
    j["config"] = nlohmann::json::parse(model_echo(doc));
    j["config"]["rule"] = to_string(kind);
    j["config"]["q"] = rule.q;
    j["config"]["count"] = count;
    j["config"]["alpha_min"] = alpha_min ? nlohmann::json(*alpha_min) : nlohmann::json(nullptr);
    j["alpha_star"] = sel.alpha_star;
    j["psi_star"] = sel.psi_star;
    j["boundary_flag"] = to_string(sel.flag);
    j["grid_index"] = sel.index;
    j["err_x"] = m.err_x;
    j["err_T"] = m.err_T;
    j["data_err"] = m.data_err;
    j["bias"] = m.bias;
    write_output(output, j.dump() + "\n");
    return 0;
}

int cmd_conditions(const ModelFlags& flags, const std::vector<std::string>& checks,
                   double nu, double mu_flag, double epsilon, double epsilon2,
                   std::size_t count, bool stability, const std::string& output,
                   const std::string& ratios_out) {
    ModelDocument doc = flags.resolve();
    auto [problem, noise] = realize_model(doc);
    double mu = mu_flag < 0 ? doc.mu : mu_flag;

    auto run_check = [&](const std::string& name, const SpectralProblem& prob,
                         const NoiseRealization& nz) -> ConditionReport {
        if (name == "noise")
            return check_noise_condition(prob, nz, nu, make_condition_grid(prob, count));
        if (name == "regularity")
            return check_regularity_condition(prob, make_condition_grid(prob, count));
        if (name == "pms_noise")
            return check_pms_noise_condition(prob, nz, doc.p, epsilon,
                                             make_one_sided_condition_grid(prob, count));
        if (name == "source_tightness")
            return check_source_tightness_condition(prob, mu, epsilon2,
                                                    make_one_sided_condition_grid(prob, count));
        if (name == "gcv_noise")
            return check_gcv_noise_condition(prob, nz, doc.p, epsilon,
                                             make_one_sided_condition_grid(prob, count));
        if (name == "gcv_regularity")
            return check_gcv_regularity_condition(prob, mu, epsilon2,
                                                  make_one_sided_condition_grid(prob, count));
        throw parameter_error("unknown condition check '" + name +
                              "' (expected noise, regularity, pms_noise, source_tightness, "
                              "gcv_noise, or gcv_regularity)");
    };

    nlohmann::json echo = nlohmann::json::parse(model_echo(doc));
    echo["nu"] = nu;
    echo["condition_mu"] = mu;
    echo["epsilon"] = epsilon;
    echo["epsilon2"] = epsilon2;
    echo["count"] = count;

    nlohmann::json out;
    out["version"] = std::string(k_version_line);
    out["config"] = echo;
    out["reports"] = nlohmann::json::array();

    std::string ratios_all;
    for (const auto& name : checks) {
        ConditionReport report = run_check(name, problem, noise);
        nlohmann::json rj = nlohmann::json::parse(condition_to_json(report, echo.dump()));
        rj.erase("version");
        rj.erase("config");

        if (stability) {
            // the single-instance constant is only trusted if it is stable
            // under tenfold dimension refinement
            if (!doc.eigenvalues.empty())
                throw parameter_error(
                    "conditions --stability requires a generated (not explicit) model");
            std::vector<std::size_t> sizes;
            if (problem.size() >= 100)
                for (std::size_t n = problem.size() / 100; n <= problem.size(); n *= 10)
                    if (n >= 100) sizes.push_back(n);
            if (sizes.size() >= 2) {
                StabilityProbe probe = assess_n_stability(
                    [&](std::size_t n) {
                        SpectralProblem prob_n =
                            build_polynomial_problem(doc.gamma, n, doc.mu, doc.s);
                        NoiseRealization noise_n = build_polynomial_noise(
                            doc.beta, doc.tau, n, doc.signs, doc.seed);
                        if (doc.eta)
                            noise_n = scale_noise_to_eta(noise_n, prob_n, doc.p, *doc.eta);
                        return run_check(name, prob_n, noise_n).constant;
                    },
                    sizes);
                nlohmann::json pj;
                pj["sizes"] = probe.sizes;
                pj["constants"] = probe.constants;
                pj["steps"] = probe.steps;
                pj["stable"] = probe.stable;
                rj["stability"] = pj;
            }
        }
        out["reports"].push_back(rj);
        if (!ratios_out.empty())
            ratios_all += condition_ratios_csv(report, echo.dump());
    }

    if (!ratios_out.empty()) write_output(ratios_out, ratios_all);
    write_output(output, out.dump() + "\n");
    return 0;
}

int cmd_rate_study(const std::string& config_path, unsigned workers_override,
                   const std::string& output, const std::string& summary_out) {
    std::ifstream in(config_path);
    if (!in) throw parameter_error("cannot open rate-study config: " + config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    RateStudyConfig config = rate_config_from_json_text(buffer.str());
    if (workers_override > 0) config.workers = workers_override;

    RateStudyReport report = run_rate_study(config);
    write_output(output, records_csv(report));
    if (!summary_out.empty()) write_output(summary_out, report_to_json(report) + "\n");
    return report.all_passed ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heuristic regularization-parameter choice for spectral Tikhonov problems"};
    app.set_version_flag("--version", std::string(heurreg::k_version_line));
    app.require_subcommand(1);

    unsigned workers = 0;
    app.add_option("--workers", workers,
                   "worker threads (0 = HEURREG_WORKERS env or hardware)")
        ->capture_default_str();

    // problem
    auto* problem_cmd = app.add_subcommand("problem", "generate a model document");
    ModelFlags problem_flags;
    problem_flags.attach(problem_cmd);
    std::string problem_out;
    bool problem_arrays = false;
    problem_cmd->add_option("--output", problem_out, "output file (default stdout)");
    problem_cmd->add_flag("--arrays", problem_arrays,
                          "embed explicit coefficient arrays in the document");

    // psi-curve
    auto* curve_cmd = app.add_subcommand("psi-curve", "trace every rule functional over a grid");
    ModelFlags curve_flags;
    curve_flags.attach(curve_cmd);
    double curve_q = -1.0;
    std::size_t curve_count = 400;
    std::optional<double> curve_alpha_min;
    std::string curve_out;
    curve_cmd->add_option("--q", curve_q, "weighting exponent q for the HD/HR columns (default p)");
    curve_cmd->add_option("--count", curve_count, "grid size")->capture_default_str();
    curve_cmd->add_option("--alpha-min", curve_alpha_min, "override the smallest grid alpha");
    curve_cmd->add_option("--output", curve_out, "output CSV file (default stdout)");

    // select
    auto* select_cmd = app.add_subcommand("select", "pick alpha by one rule");
    ModelFlags select_flags;
    select_flags.attach(select_cmd);
    std::string select_rule = "QO";
    std::optional<double> select_q;
    std::size_t select_count = 400;
    std::optional<double> select_alpha_min;
    std::string select_out;
    select_cmd->add_option("--rule", select_rule, "QO | HD | HR | PMS | GCV | Residual")
        ->capture_default_str();
    select_cmd->add_option("--q", select_q, "weighting exponent q (HD/HR; requires q ≥ p)");
    select_cmd->add_option("--count", select_count, "grid size")->capture_default_str();
    select_cmd->add_option("--alpha-min", select_alpha_min, "override the smallest grid alpha");
    select_cmd->add_option("--output", select_out, "output JSON file (default stdout)");

    // conditions
    auto* cond_cmd = app.add_subcommand("conditions", "verify structural conditions numerically");
    ModelFlags cond_flags;
    cond_flags.attach(cond_cmd);
    std::vector<std::string> cond_checks = {"noise", "regularity"};
    double cond_nu = 1.0;
    double cond_mu = -1.0;
    double cond_epsilon = 0.1;
    double cond_epsilon2 = 0.1;
    std::size_t cond_count = 200;
    bool cond_stability = false;
    std::string cond_out, cond_ratios_out;
    cond_cmd->add_option("--check", cond_checks,
                         "checks to run: noise regularity pms_noise source_tightness "
                         "gcv_noise gcv_regularity")
        ->capture_default_str();
    cond_cmd->add_option("--nu", cond_nu, "spread exponent ν for the noise condition")
        ->capture_default_str();
    cond_cmd->add_option("--cond-mu", cond_mu,
                         "smoothness μ for source tightness (default: model μ)");
    cond_cmd->add_option("--epsilon", cond_epsilon,
                         "margin ε for the noise lower bound (0 < ε < 2p)")
        ->capture_default_str();
    cond_cmd->add_option("--epsilon2", cond_epsilon2,
                         "margin ε₂ for source tightness (> 0)")
        ->capture_default_str();
    cond_cmd->add_option("--count", cond_count, "condition grid size")->capture_default_str();
    cond_cmd->add_flag("--stability", cond_stability,
                       "probe constant stability under tenfold dimension refinement");
    cond_cmd->add_option("--output", cond_out, "output JSON file (default stdout)");
    cond_cmd->add_option("--ratios-out", cond_ratios_out, "write per-alpha ratio CSV here");

    // rate-study
    auto* study_cmd = app.add_subcommand("rate-study", "run a convergence-rate experiment");
    std::string study_config;
    std::string study_out, study_summary_out;
    study_cmd->add_option("config", study_config, "JSON config file")->required();
    study_cmd->add_option("--output", study_out, "records CSV file (default stdout)");
    study_cmd->add_option("--summary-out", study_summary_out, "full report JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 1;
    }

    try {
        if (problem_cmd->parsed()) return cmd_problem(problem_flags, problem_out, problem_arrays);
        if (curve_cmd->parsed())
            return cmd_psi_curve(curve_flags, curve_q, curve_count, curve_alpha_min, workers,
                                 curve_out);
        if (select_cmd->parsed())
            return cmd_select(select_flags, select_rule, select_q, select_count,
                              select_alpha_min, workers, select_out);
        if (cond_cmd->parsed())
            return cmd_conditions(cond_flags, cond_checks, cond_nu, cond_mu, cond_epsilon,
                                  cond_epsilon2, cond_count, cond_stability, cond_out,
                                  cond_ratios_out);
        if (study_cmd->parsed())
            return cmd_rate_study(study_config, workers, study_out, study_summary_out);
    } catch (const heurreg::parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const heurreg::usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const heurreg::selection_failed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const heurreg::degenerate_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

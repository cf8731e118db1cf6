#include "heurreg/io.hpp"

#include "heurreg/errors.hpp"
#include "heurreg/version.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <set>

namespace heurreg {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_string(SignPattern signs) {
    return signs == SignPattern::alternating ? "alternating" : "seeded_random";
}

SignPattern sign_pattern_from_string(const std::string& name) {
    if (name == "alternating") return SignPattern::alternating;
    if (name == "seeded_random") return SignPattern::seeded_random;
    throw parameter_error("unknown sign pattern '" + name +
                          "' (expected alternating or seeded_random)");
}

namespace {

// deterministic writer: sorted keys (json is map-backed), every float as
// format_double, no whitespace
void dump_value(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_value(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : j) {
                if (!first) out += ',';
                first = false;
                dump_value(item, out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

std::string dump_sorted(const json& j) {
    std::string out;
    dump_value(j, out);
    return out;
}

std::pair<std::size_t, std::size_t> line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::size_t line_of_key(const std::string& text, const std::string& key) {
    auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return line_of_byte(text, pos + 1).first;
}

json parse_json(const std::string& text, const char* who) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_of_byte(text, e.byte);
        throw parameter_error(std::string(who) + ": parse error at line " +
                              std::to_string(line) + ", column " + std::to_string(col) +
                              ": " + e.what());
    }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& text, const char* who) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (allowed.count(it.key())) continue;
        std::size_t line = line_of_key(text, it.key());
        std::string where = line > 0 ? " at line " + std::to_string(line) : "";
        throw parameter_error(std::string(who) + ": unknown key \"" + it.key() + "\"" + where);
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    return it->get<T>();
}

std::vector<double> get_array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    return it->get<std::vector<double>>();
}

} // namespace

std::string model_to_json(const ModelDocument& doc) {
    json j;
    j["gamma"] = doc.gamma;
    j["n"] = doc.n;
    j["mu"] = doc.mu;
    j["s"] = doc.s;
    j["beta"] = doc.beta;
    j["tau"] = doc.tau;
    j["signs"] = to_string(doc.signs);
    j["seed"] = doc.seed;
    j["p"] = doc.p;
    if (doc.eta) j["eta"] = *doc.eta;
    if (!doc.eigenvalues.empty()) j["eigenvalues"] = doc.eigenvalues;
    if (!doc.solution.empty()) j["solution"] = doc.solution;
    if (!doc.source.empty()) j["source"] = doc.source;
    if (!doc.noise_coefficients.empty()) j["noise_coefficients"] = doc.noise_coefficients;
    return dump_sorted(j);
}

ModelDocument model_from_json_text(const std::string& text) {
    json j = parse_json(text, "model document");
    if (!j.is_object()) throw parameter_error("model document: top level must be an object");
    static const std::set<std::string> allowed = {
        "gamma", "n",      "mu",   "s",    "beta",        "tau",
        "signs", "seed",   "p",    "eta",  "eigenvalues", "solution",
        "source", "noise_coefficients"};
    reject_unknown_keys(j, allowed, text, "model document");

    ModelDocument doc;
    doc.gamma = get_or(j, "gamma", doc.gamma);
    doc.n = get_or(j, "n", doc.n);
    doc.mu = get_or(j, "mu", doc.mu);
    doc.s = get_or(j, "s", doc.s);
    doc.beta = get_or(j, "beta", doc.beta);
    doc.tau = get_or(j, "tau", doc.tau);
    doc.signs = sign_pattern_from_string(get_or<std::string>(j, "signs", "alternating"));
    doc.seed = get_or(j, "seed", doc.seed);
    doc.p = get_or(j, "p", doc.p);
    if (j.contains("eta") && !j["eta"].is_null()) doc.eta = j["eta"].get<double>();
    doc.eigenvalues = get_array(j, "eigenvalues");
    doc.solution = get_array(j, "solution");
    doc.source = get_array(j, "source");
    doc.noise_coefficients = get_array(j, "noise_coefficients");
    return doc;
}

std::pair<SpectralProblem, NoiseRealization> realize_model(const ModelDocument& doc) {
    SpectralProblem problem;
    if (doc.eigenvalues.empty()) {
        problem = build_polynomial_problem(doc.gamma, doc.n, doc.mu, doc.s);
    } else {
        if (doc.solution.size() != doc.eigenvalues.size())
            throw parameter_error(
                "model document: explicit eigenvalues require a solution array of equal length");
        problem = make_problem(doc.eigenvalues, doc.solution, doc.source);
    }

    NoiseRealization noise;
    if (!doc.noise_coefficients.empty()) {
        noise = make_noise(doc.noise_coefficients, problem, doc.p);
    } else {
        NoiseRealization generated =
            build_polynomial_noise(doc.beta, doc.tau, problem.size(), doc.signs, doc.seed);
        auto params = generated.params;
        noise = make_noise(std::move(generated.coefficients), problem, doc.p);
        noise.params = params;
    }
    if (doc.eta) noise = scale_noise_to_eta(noise, problem, doc.p, *doc.eta);
    return {std::move(problem), std::move(noise)};
}

ModelDocument document_of(const SpectralProblem& problem, const NoiseRealization& noise) {
    ModelDocument doc;
    if (problem.params) {
        doc.gamma = problem.params->gamma;
        doc.mu = problem.params->mu;
        doc.s = problem.params->s;
    }
    doc.n = problem.size();
    if (noise.params) {
        doc.beta = noise.params->beta;
        doc.tau = noise.params->tau;
        doc.signs = noise.params->signs;
        doc.seed = noise.params->seed;
    }
    doc.p = noise.p;
    doc.eigenvalues = problem.eigenvalues;
    doc.solution = problem.solution;
    doc.source = problem.source;
    doc.noise_coefficients = noise.coefficients;
    return doc;
}

namespace {

json rule_to_json(const RuleSpec& rule) {
    json j;
    j["kind"] = to_string(rule.kind);
    j["p"] = rule.p;
    if (rule.kind == RuleKind::HD || rule.kind == RuleKind::HR) j["q"] = rule.q;
    return j;
}

json config_to_json_value(const RateStudyConfig& config) {
    json j;
    j["gamma"] = config.gamma;
    j["n"] = config.n;
    j["mu"] = config.mu;
    j["s"] = config.s;
    j["beta"] = config.beta;
    j["tau"] = config.tau;
    j["signs"] = to_string(config.signs);
    j["seed"] = config.seed;
    j["p"] = config.p;
    j["rules"] = json::array();
    for (const auto& rule : config.rules) j["rules"].push_back(rule_to_json(rule));
    j["eta_max"] = config.eta_max;
    j["eta_min"] = config.eta_min;
    j["eta_levels"] = config.eta_levels;
    j["redraw_per_level"] = config.redraw_per_level;
    j["zero_noise"] = config.zero_noise;
    j["grid_count"] = config.grid_count;
    j["alpha_min"] = config.alpha_min ? json(*config.alpha_min) : json(nullptr);
    j["regularity_assumed"] = config.regularity_assumed;
    j["epsilon"] = config.epsilon;
    j["epsilon2"] = config.epsilon2;
    j["slope_tolerance"] = config.slope_tolerance;
    j["apriori_prefactor"] = config.apriori_prefactor;
    // workers is accepted on input but never echoed: execution detail, not part
    // of the experiment, and outputs must be identical for every worker count
    return j;
}

} // namespace

std::string rate_config_to_json(const RateStudyConfig& config) {
    return dump_sorted(config_to_json_value(config));
}

RateStudyConfig rate_config_from_json_text(const std::string& text) {
    json j = parse_json(text, "rate-study config");
    if (!j.is_object())
        throw parameter_error("rate-study config: top level must be an object");
    static const std::set<std::string> allowed = {
        "gamma",        "n",           "mu",          "s",
        "beta",         "tau",         "signs",       "seed",
        "p",            "rules",       "eta_max",     "eta_min",
        "eta_levels",   "redraw_per_level", "zero_noise", "grid_count",
        "alpha_min",    "regularity_assumed", "epsilon", "epsilon2",
        "slope_tolerance", "apriori_prefactor", "workers"};
    reject_unknown_keys(j, allowed, text, "rate-study config");

    RateStudyConfig config;
    config.gamma = get_or(j, "gamma", config.gamma);
    config.n = get_or(j, "n", config.n);
    config.mu = get_or(j, "mu", config.mu);
    config.s = get_or(j, "s", config.s);
    config.beta = get_or(j, "beta", config.beta);
    config.tau = get_or(j, "tau", config.tau);
    config.signs = sign_pattern_from_string(get_or<std::string>(j, "signs", "alternating"));
    config.seed = get_or(j, "seed", config.seed);
    config.p = get_or(j, "p", config.p);
    config.eta_max = get_or(j, "eta_max", config.eta_max);
    config.eta_min = get_or(j, "eta_min", config.eta_min);
    config.eta_levels = get_or(j, "eta_levels", config.eta_levels);
    config.redraw_per_level = get_or(j, "redraw_per_level", config.redraw_per_level);
    config.zero_noise = get_or(j, "zero_noise", config.zero_noise);
    config.grid_count = get_or(j, "grid_count", config.grid_count);
    if (j.contains("alpha_min") && !j["alpha_min"].is_null())
        config.alpha_min = j["alpha_min"].get<double>();
    config.regularity_assumed = get_or(j, "regularity_assumed", config.regularity_assumed);
    config.epsilon = get_or(j, "epsilon", config.epsilon);
    config.epsilon2 = get_or(j, "epsilon2", config.epsilon2);
    config.slope_tolerance = get_or(j, "slope_tolerance", config.slope_tolerance);
    config.apriori_prefactor = get_or(j, "apriori_prefactor", config.apriori_prefactor);
    config.workers = get_or(j, "workers", config.workers);

    auto rules_it = j.find("rules");
    if (rules_it == j.end() || !rules_it->is_array() || rules_it->empty())
        throw parameter_error("rate-study config: \"rules\" must be a non-empty array");
    static const std::set<std::string> rule_allowed = {"kind", "q", "p"};
    for (const auto& rj : *rules_it) {
        if (!rj.is_object())
            throw parameter_error("rate-study config: each rule must be an object");
        reject_unknown_keys(rj, rule_allowed, text, "rate-study config rule");
        if (!rj.contains("kind"))
            throw parameter_error("rate-study config: rule entry needs \"kind\"");
        RuleKind kind = rule_kind_from_string(rj["kind"].get<std::string>());
        std::optional<double> q;
        if (rj.contains("q") && !rj["q"].is_null()) q = rj["q"].get<double>();
        double rule_p = get_or(rj, "p", config.p);
        config.rules.push_back(make_rule(kind, q, rule_p));
    }
    return config;
}

std::string csv_document(const std::string& config_json,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    out += "# ";
    out += k_version_line;
    out += "\n# config: ";
    out += config_json;
    out += "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += row[c];
        }
        out += '\n';
    }
    return out;
}

std::string records_csv(const RateStudyReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(report.records.size());
    for (const auto& rec : report.records) {
        rows.push_back({to_string(rec.rule), format_double(rec.eta),
                        format_double(rec.alpha_star), to_string(rec.flag),
                        format_double(rec.err_x), format_double(rec.err_T),
                        format_double(rec.psi_star), format_double(rec.alpha_opt)});
    }
    return csv_document(
        rate_config_to_json(report.config),
        {"rule", "eta", "alpha_star", "boundary_flag", "err_x", "err_T", "psi_star", "alpha_opt"},
        rows);
}

namespace {

json fit_to_json(const FitResult& fit) {
    json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["slope_stderr"] = fit.slope_stderr;
    j["n_points"] = fit.n_points;
    return j;
}

json condition_to_json_value(const ConditionReport& report) {
    json j;
    j["id"] = report.id;
    j["constant"] = report.constant;
    j["sup_type"] = report.sup_type;
    j["satisfied"] = report.satisfied;
    j["degenerate"] = report.degenerate;
    j["note"] = report.note;
    j["grid_size"] = report.alphas.size();
    return j;
}

} // namespace

std::string report_to_json(const RateStudyReport& report) {
    json j;
    j["version"] = std::string(k_version_line);
    j["config"] = config_to_json_value(report.config);
    j["all_passed"] = report.all_passed;

    j["records"] = json::array();
    for (const auto& rec : report.records) {
        json r;
        r["rule"] = to_string(rec.rule);
        r["q"] = rec.q;
        r["eta"] = rec.eta;
        r["delta"] = rec.delta;
        r["alpha_star"] = rec.alpha_star;
        r["boundary_flag"] = to_string(rec.flag);
        r["psi_star"] = rec.psi_star;
        r["err_x"] = rec.err_x;
        r["err_T"] = rec.err_T;
        r["alpha_opt"] = rec.alpha_opt;
        r["err_x_opt"] = rec.err_x_opt;
        r["err_T_opt"] = rec.err_T_opt;
        r["efficiency"] = rec.efficiency;
        j["records"].push_back(std::move(r));
    }

    j["summaries"] = json::array();
    for (const auto& summary : report.summaries) {
        json s;
        s["rule"] = to_string(summary.rule.kind);
        s["q"] = summary.rule.q;
        s["p"] = summary.rule.p;
        s["interior_count"] = summary.interior_count;
        s["flagged_count"] = summary.flagged_count;
        s["fit_x"] = fit_to_json(summary.fit_x);
        s["fit_T"] = fit_to_json(summary.fit_T);
        s["spearman"] = summary.spearman;
        s["fit_ok"] = summary.fit_ok;
        s["status"] = summary.status;
        s["target_exponent"] =
            summary.target_exponent ? json(*summary.target_exponent) : json(nullptr);
        s["target_note"] = summary.target_note;
        s["passed"] = summary.passed ? json(*summary.passed) : json(nullptr);
        j["summaries"].push_back(std::move(s));
    }

    j["conditions"] = json::array();
    for (const auto& condition : report.conditions)
        j["conditions"].push_back(condition_to_json_value(condition));

    return dump_sorted(j);
}

std::string condition_to_json(const ConditionReport& report, const std::string& config_json) {
    json j = condition_to_json_value(report);
    j["version"] = std::string(k_version_line);
    j["config"] = parse_json(config_json, "condition config echo");
    return dump_sorted(j);
}

std::string condition_ratios_csv(const ConditionReport& report, const std::string& config_json) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(report.alphas.size());
    for (std::size_t k = 0; k < report.alphas.size(); ++k)
        rows.push_back({format_double(report.alphas[k]), format_double(report.ratios[k])});
    return csv_document(config_json, {"alpha", "ratio"}, rows);
}

} // namespace heurreg

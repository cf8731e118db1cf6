#include "heurreg/experiments.hpp"

#include "heurreg/errors.hpp"
#include "heurreg/parallel.hpp"
#include "heurreg/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace heurreg {

namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();
constexpr double k_nan = std::numeric_limits<double>::quiet_NaN();

// admits exact boundary cases that wander by a rounding error
constexpr double k_slack = 1e-12;

void require(bool ok, const std::string& msg) {
    if (!ok) throw parameter_error(msg);
}

} // namespace

FitResult fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "fit_loglog_slope: x and y must have equal length");
    require(x.size() >= 2, "fit_loglog_slope: needs at least two points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(std::isfinite(x[i]) && x[i] > 0.0 && std::isfinite(y[i]) && y[i] > 0.0,
                "fit_loglog_slope: values must be strictly positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }

    double mx = sum_indexed(n, [&](std::size_t i) { return lx[i]; }) / static_cast<double>(n);
    double my = sum_indexed(n, [&](std::size_t i) { return ly[i]; }) / static_cast<double>(n);
    double sxx = sum_indexed(n, [&](std::size_t i) { return (lx[i] - mx) * (lx[i] - mx); });
    double sxy = sum_indexed(n, [&](std::size_t i) { return (lx[i] - mx) * (ly[i] - my); });
    require(sxx > 0.0, "fit_loglog_slope: needs at least two distinct x values");

    FitResult fit;
    fit.n_points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double ss_res = sum_indexed(n, [&](std::size_t i) {
            double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
            return r * r;
        });
        fit.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

double theoretical_exponent(RuleKind kind, double mu, double p, double q,
                            bool regularity) {
    require(std::isfinite(mu) && mu >= 0.0, "theoretical_exponent: mu must be >= 0");
    require(std::isfinite(p) && p >= 0.0 && p <= 0.5,
            "theoretical_exponent: p must lie in [0, 1/2]");
    double opt = 2.0 * mu / (2.0 * mu + 2.0 * p + 1.0);

    switch (kind) {
        case RuleKind::QO:
            if (mu > 1.0 + k_slack)
                throw saturation_violated(
                    "quasi-optimality exponent requires mu <= 1 (saturation at mu = 1)");
            if (mu == 0.0) return 0.0;
            return regularity ? opt : opt * mu;
        case RuleKind::HD:
            require(std::isfinite(q) && q >= p - k_slack && q <= p + 1.0 + k_slack,
                    "theoretical_exponent: HD requires p <= q <= p + 1");
            if (q > 0.5 - mu + k_slack)
                throw saturation_violated(
                    "HD exponent requires q <= 1/2 - mu (saturation at mu = 1/2 - q)");
            if (mu == 0.0) return 0.0;
            return regularity ? opt : opt * (2.0 * mu / (1.0 - 2.0 * q));
        case RuleKind::HR:
            require(std::isfinite(q) && q >= p - k_slack && q <= p + 1.5 + k_slack,
                    "theoretical_exponent: HR requires p <= q <= p + 3/2");
            if (q > 1.0 - mu + k_slack)
                throw saturation_violated(
                    "HR exponent requires q <= 1 - mu (saturation at mu = 1 - q)");
            if (mu == 0.0) return 0.0;
            return regularity ? opt : opt * (mu / (1.0 - q));
        case RuleKind::PMS:
            if (mu > 0.5 + k_slack)
                throw saturation_violated(
                    "PMS exponent requires mu <= 1/2 (saturation at mu = 1/2)");
            return opt * (2.0 * mu + 1.0) / 2.0;
        default:
            throw usage_error("no closed-form eta-exponent for rule " + to_string(kind));
    }
}

PmsCaseExponents pms_case_exponents(double mu, double p, double epsilon) {
    require(std::isfinite(mu) && mu >= 0.0 && mu <= 0.5 + k_slack,
            "pms_case_exponents: requires 0 <= mu <= 1/2");
    require(std::isfinite(p) && p > 0.0 && p <= 0.5,
            "pms_case_exponents: requires 0 < p <= 1/2");
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 2.0 * p,
            "pms_case_exponents: requires 0 < epsilon < 2p");
    double denom = 2.0 * mu + 2.0 * p + 1.0;
    PmsCaseExponents out;
    out.above_opt = (2.0 * mu / denom) * (2.0 * mu + 1.0) / 2.0;
    out.below_opt = 2.0 * mu / denom -
                    epsilon * (2.0 * p + 1.0) / ((2.0 * p - epsilon) * denom);
    return out;
}

double pms_t_norm_exponent(double mu, double p) {
    require(std::isfinite(mu) && mu >= 0.0 && mu <= 0.5 + k_slack,
            "pms_t_norm_exponent: requires 0 <= mu <= 1/2");
    require(std::isfinite(p) && p >= 0.0 && p <= 0.5,
            "pms_t_norm_exponent: p must lie in [0, 1/2]");
    return (2.0 * mu + 1.0) / (2.0 * mu + 2.0 * p + 1.0);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y) {
    require(x.size() == y.size(), "spearman_rank_correlation: lengths must match");
    require(x.size() >= 2, "spearman_rank_correlation: needs at least two points");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    const std::size_t n = x.size();
    double mx = sum_indexed(n, [&](std::size_t i) { return rx[i]; }) / static_cast<double>(n);
    double my = sum_indexed(n, [&](std::size_t i) { return ry[i]; }) / static_cast<double>(n);
    double sxx = sum_indexed(n, [&](std::size_t i) { return (rx[i] - mx) * (rx[i] - mx); });
    double syy = sum_indexed(n, [&](std::size_t i) { return (ry[i] - my) * (ry[i] - my); });
    double sxy = sum_indexed(n, [&](std::size_t i) { return (rx[i] - mx) * (ry[i] - my); });
    if (sxx == 0.0 || syy == 0.0) return 0.0; // constant ranks carry no ordering signal
    return sxy / std::sqrt(sxx * syy);
}

namespace {

// ||x_alpha(y + e) - xdag|| over the whole grid, one value per point
std::vector<double> err_x_curve(const SpectralProblem& problem,
                                const NoiseRealization& noise,
                                const AlphaGrid& grid, unsigned workers) {
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t k) {
        double a = grid.points[k];
        compensated_sum acc;
        for (std::size_t i = 0; i < problem.size(); ++i) {
            double lam = problem.eigenvalues[i];
            double sig = std::sqrt(lam);
            double diff = sig * (problem.exact_data[i] + noise.coefficients[i]) / (lam + a) -
                          problem.solution[i];
            acc.add(diff * diff);
        }
        out[k] = std::sqrt(acc.value());
    });
    return out;
}

void validate_rule_spec(const RuleSpec& rule) {
    require(std::isfinite(rule.p) && rule.p >= 0.0 && rule.p <= 0.5,
            "rate study: rule p must lie in [0, 1/2]");
    if (rule.kind == RuleKind::HD || rule.kind == RuleKind::HR)
        require(rule.q >= rule.p,
                to_string(rule.kind) + " requires q ≥ p in its rule spec");
}

// conditions that failed their own preconditions still appear in the report,
// marked degenerate with the reason
ConditionReport guarded(const std::string& id, const std::function<ConditionReport()>& run) {
    try {
        return run();
    } catch (const parameter_error& e) {
        ConditionReport report;
        report.id = id;
        report.degenerate = true;
        report.satisfied = false;
        report.note = e.what();
        return report;
    }
}

} // namespace

RateStudyReport run_rate_study(const RateStudyConfig& config) {
    require(!config.rules.empty(), "rate study: at least one rule required");
    for (const auto& rule : config.rules) validate_rule_spec(rule);
    require(config.grid_count >= 2, "rate study: grid_count must be >= 2");
    require(std::isfinite(config.slope_tolerance) && config.slope_tolerance > 0.0,
            "rate study: slope_tolerance must be > 0");
    if (!config.zero_noise) {
        require(config.eta_levels >= 4, "rate study: at least 4 noise levels required");
        require(std::isfinite(config.eta_min) && std::isfinite(config.eta_max) &&
                    0.0 < config.eta_min && config.eta_min < config.eta_max,
                "rate study: requires 0 < eta_min < eta_max");
    }

    RateStudyReport report;
    report.config = config;

    SpectralProblem problem = build_polynomial_problem(config.gamma, config.n,
                                                       config.mu, config.s);
    AlphaGrid grid = make_alpha_grid(problem, config.grid_count, config.alpha_min);
    unsigned workers = resolve_workers(config.workers);

    std::vector<double> etas;
    if (config.zero_noise) {
        etas.push_back(0.0);
    } else {
        etas.resize(config.eta_levels);
        double ratio = std::pow(config.eta_min / config.eta_max,
                                1.0 / static_cast<double>(config.eta_levels - 1));
        for (std::size_t l = 0; l < config.eta_levels; ++l)
            etas[l] = config.eta_max * std::pow(ratio, static_cast<double>(l));
    }

    NoiseRealization base_noise;
    if (!config.zero_noise)
        base_noise = build_polynomial_noise(config.beta, config.tau, config.n,
                                            config.signs, config.seed);

    const std::size_t n_rules = config.rules.size();
    const std::size_t n_levels = etas.size();
    std::vector<RateRecord> records(n_rules * n_levels);
    std::vector<NoiseRealization> level_noise(n_levels);

    for (std::size_t l = 0; l < n_levels; ++l) {
        if (config.zero_noise) {
            NoiseRealization zero;
            zero.coefficients.assign(config.n, 0.0);
            zero.p = config.p;
            level_noise[l] = std::move(zero);
        } else if (config.redraw_per_level) {
            auto redrawn = build_polynomial_noise(config.beta, config.tau, config.n,
                                                  config.signs, config.seed + l);
            level_noise[l] = scale_noise_to_eta(redrawn, problem, config.p, etas[l]);
        } else {
            level_noise[l] = scale_noise_to_eta(base_noise, problem, config.p, etas[l]);
        }

        const NoiseRealization& noise = level_noise[l];
        std::vector<double> data(problem.size());
        for (std::size_t i = 0; i < problem.size(); ++i)
            data[i] = problem.exact_data[i] + noise.coefficients[i];

        auto errs = err_x_curve(problem, noise, grid, workers);
        double min_err = k_inf;
        for (double v : errs)
            if (std::isfinite(v)) min_err = std::min(min_err, v);

        for (std::size_t r = 0; r < n_rules; ++r) {
            const RuleSpec& rule = config.rules[r];
            SelectionResult sel = select_alpha(rule, problem, data, grid, workers);
            ErrorMetrics at_star = error_metrics(problem, noise, sel.alpha_star);

            RateRecord rec;
            rec.rule = rule.kind;
            rec.q = rule.q;
            rec.eta = etas[l];
            rec.delta = noise.delta;
            rec.alpha_star = sel.alpha_star;
            rec.flag = sel.flag;
            rec.psi_star = sel.psi_star;
            rec.err_x = at_star.err_x;
            rec.err_T = at_star.err_T;
            if (config.zero_noise) {
                rec.alpha_opt = k_nan;
                rec.err_x_opt = k_nan;
                rec.err_T_opt = k_nan;
            } else {
                rec.alpha_opt = apriori_optimal_alpha(etas[l], config.mu, config.p,
                                                      config.apriori_prefactor);
                ErrorMetrics at_opt = error_metrics(problem, noise, rec.alpha_opt);
                rec.err_x_opt = at_opt.err_x;
                rec.err_T_opt = at_opt.err_T;
            }
            rec.efficiency = min_err > 0.0 ? at_star.err_x / min_err : k_inf;
            records[r * n_levels + l] = std::move(rec);
        }
    }
    report.records = std::move(records);

    bool all_passed = true;
    for (std::size_t r = 0; r < n_rules; ++r) {
        const RuleSpec& rule = config.rules[r];
        RuleSummary summary;
        summary.rule = rule;

        std::vector<double> xs, ys_x, ys_t, alphas;
        for (std::size_t l = 0; l < n_levels; ++l) {
            const RateRecord& rec = report.records[r * n_levels + l];
            if (rec.flag != SelectionFlag::interior) {
                ++summary.flagged_count;
                continue;
            }
            if (rec.eta <= 0.0) continue;
            ++summary.interior_count;
            xs.push_back(rec.eta);
            ys_x.push_back(rec.err_x);
            ys_t.push_back(rec.err_T);
            alphas.push_back(rec.alpha_star);
        }

        bool excessive_boundary =
            4 * summary.flagged_count > n_levels; // more than 25% at the edges
        summary.fit_ok = summary.interior_count >= 4 && !excessive_boundary;
        if (excessive_boundary)
            summary.status = "excessive-boundary: " + std::to_string(summary.flagged_count) +
                             " of " + std::to_string(n_levels) + " selections at grid edges";
        else if (summary.interior_count < 4)
            summary.status = "fit-degenerate: only " + std::to_string(summary.interior_count) +
                             " interior selections";
        else
            summary.status = "ok";

        if (summary.interior_count >= 2) {
            summary.fit_x = fit_loglog_slope(xs, ys_x);
            summary.fit_T = fit_loglog_slope(xs, ys_t);
            summary.spearman = spearman_rank_correlation(alphas, xs);
        }

        try {
            if (rule.kind == RuleKind::PMS)
                summary.target_exponent = pms_t_norm_exponent(config.mu, config.p);
            else
                summary.target_exponent = theoretical_exponent(
                    rule.kind, config.mu, config.p, rule.q, config.regularity_assumed);
        } catch (const usage_error& e) {
            summary.target_note = e.what();
        } catch (const parameter_error& e) {
            summary.target_note = e.what();
        }

        if (summary.fit_ok && summary.target_exponent) {
            double target = *summary.target_exponent;
            double tol = config.slope_tolerance;
            if (rule.kind == RuleKind::PMS)
                summary.passed = std::abs(summary.fit_T.slope - target) <= tol;
            else if (config.regularity_assumed)
                summary.passed = std::abs(summary.fit_x.slope - target) <= tol;
            else
                summary.passed = summary.fit_x.slope >= target - tol;
        }

        if (!summary.fit_ok || (summary.passed && !*summary.passed)) all_passed = false;
        report.summaries.push_back(std::move(summary));
    }
    report.all_passed = all_passed;

    // structural condition diagnostics for the configured rules
    bool any_qo = false, any_pms = false, any_gcv = false;
    std::set<double> hd_hr_qs;
    for (const auto& rule : config.rules) {
        if (rule.kind == RuleKind::QO) any_qo = true;
        if (rule.kind == RuleKind::PMS) any_pms = true;
        if (rule.kind == RuleKind::GCV) any_gcv = true;
        if (rule.kind == RuleKind::HD || rule.kind == RuleKind::HR) hd_hr_qs.insert(rule.q);
    }
    const NoiseRealization& cond_noise = level_noise.front();
    if (any_qo)
        report.conditions.push_back(guarded("N_nu", [&] {
            return check_noise_condition(problem, cond_noise, 1.0,
                                         make_condition_grid(problem));
        }));
    for (double q : hd_hr_qs)
        report.conditions.push_back(guarded("N_nu", [&] {
            return check_noise_condition(problem, cond_noise, 2.0 * q,
                                         make_condition_grid(problem));
        }));
    if (config.regularity_assumed)
        report.conditions.push_back(guarded("regularity", [&] {
            return check_regularity_condition(problem, make_condition_grid(problem));
        }));
    if (any_pms) {
        report.conditions.push_back(guarded("pms_noise", [&] {
            return check_pms_noise_condition(problem, cond_noise, config.p, config.epsilon,
                                             make_one_sided_condition_grid(problem));
        }));
        report.conditions.push_back(guarded("source_tightness", [&] {
            return check_source_tightness_condition(problem, config.mu, config.epsilon2,
                                                    make_one_sided_condition_grid(problem));
        }));
    }
    if (any_gcv) {
        report.conditions.push_back(guarded("gcv_noise", [&] {
            return check_gcv_noise_condition(problem, cond_noise, config.p, config.epsilon,
                                             make_one_sided_condition_grid(problem));
        }));
        report.conditions.push_back(guarded("gcv_regularity", [&] {
            return check_gcv_regularity_condition(problem, config.mu, config.epsilon2,
                                                  make_one_sided_condition_grid(problem));
        }));
    }

    return report;
}

GcvBoundCheck gcv_bound_check(const RateStudyReport& report,
                              double epsilon, double epsilon2) {
    const RateStudyConfig& config = report.config;
    require(std::isfinite(config.p) && config.p > 0.0,
            "gcv_bound_check: requires weak-noise exponent p > 0");
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 2.0 * config.p,
            "gcv_bound_check: requires 0 < epsilon < 2p");
    require(std::isfinite(epsilon2) && epsilon2 > 0.0,
            "gcv_bound_check: requires epsilon2 > 0");

    GcvBoundCheck check;
    check.t_reg = 2.0 * config.mu + 1.0 + epsilon2;

    SpectralProblem problem = build_polynomial_problem(config.gamma, config.n,
                                                       config.mu, config.s);
    AlphaGrid grid = make_alpha_grid(problem, config.grid_count, config.alpha_min);
    unsigned workers = resolve_workers(config.workers);

    std::vector<double> rho_curve(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t k) {
        rho_curve[k] = rho(problem, grid.points[k]);
    });

    double exponent = 2.0 / (2.0 * config.p - epsilon);
    for (const RateRecord& rec : report.records) {
        if (rec.rule != RuleKind::GCV || !(rec.eta > 0.0)) continue;
        GcvLevelBound level;
        level.eta = rec.eta;
        level.delta = rec.delta;
        level.alpha_star = rec.alpha_star;
        level.boundary = rec.flag != SelectionFlag::interior;
        if (!level.boundary) {
            level.lower = std::pow(rec.eta / rec.delta, exponent);
            double d2 = rec.delta * rec.delta;
            double inf_v = k_inf;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                double a = grid.points[k];
                if (a > rec.alpha_star) continue;
                inf_v = std::min(inf_v,
                                 (std::pow(a, 2.0 * config.mu + 1.0) + d2) / rho_curve[k]);
            }
            level.upper_t2 = std::sqrt(inf_v);
            level.upper_treg = std::pow(inf_v, 1.0 / check.t_reg);
            level.contained = rec.alpha_star >= level.lower * (1.0 - k_slack) &&
                              rec.alpha_star <= level.upper_t2 * (1.0 + k_slack) &&
                              rec.alpha_star <= level.upper_treg * (1.0 + k_slack);
            level.c_low = rec.eta * rec.eta *
                          std::pow(rec.alpha_star, -(2.0 * config.p - epsilon)) /
                          (std::pow(rec.alpha_star, 2.0 * config.mu + 1.0) + d2);
            level.c_up_t2 = std::pow(rec.alpha_star, 2.0) / inf_v;
            level.c_up_treg = std::pow(rec.alpha_star, check.t_reg) / inf_v;
        }
        check.levels.push_back(level);
    }

    check.contained_all = true;
    double last_low = k_nan, last_t2 = k_nan, last_treg = k_nan;
    for (const auto& level : check.levels) {
        if (level.boundary) continue;
        check.applicable = true;
        if (!level.contained) check.contained_all = false;
        auto drift = [](double prev, double cur) {
            return std::isnan(prev) ? 0.0 : std::max(cur / prev, prev / cur);
        };
        check.max_drift_c_low = std::max(check.max_drift_c_low, drift(last_low, level.c_low));
        check.max_drift_c_up_t2 =
            std::max(check.max_drift_c_up_t2, drift(last_t2, level.c_up_t2));
        check.max_drift_c_up_treg =
            std::max(check.max_drift_c_up_treg, drift(last_treg, level.c_up_treg));
        last_low = level.c_low;
        last_t2 = level.c_up_t2;
        last_treg = level.c_up_treg;
    }
    check.constants_stable = check.applicable &&
                             check.max_drift_c_low < check.drift_tolerance &&
                             check.max_drift_c_up_t2 < check.drift_tolerance &&
                             check.max_drift_c_up_treg < check.drift_tolerance;
    if (!check.applicable)
        check.note = "no interior GCV selections; the bracket is not applicable";

    // the two structural conditions backing the bracket
    double cond_eta = 0.0;
    for (const auto& level : check.levels)
        if (!level.boundary) { cond_eta = level.eta; break; }
    if (cond_eta > 0.0 && !config.zero_noise) {
        NoiseRealization base = build_polynomial_noise(config.beta, config.tau, config.n,
                                                       config.signs, config.seed);
        NoiseRealization scaled = scale_noise_to_eta(base, problem, config.p, cond_eta);
        check.conditions.push_back(guarded("gcv_noise", [&] {
            return check_gcv_noise_condition(problem, scaled, config.p, epsilon,
                                             make_one_sided_condition_grid(problem));
        }));
    }
    check.conditions.push_back(guarded("gcv_regularity", [&] {
        return check_gcv_regularity_condition(problem, config.mu, epsilon2,
                                              make_one_sided_condition_grid(problem));
    }));
    return check;
}

} // namespace heurreg

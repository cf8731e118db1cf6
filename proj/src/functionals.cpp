#include "heurreg/functionals.hpp"

#include "heurreg/errors.hpp"
#include "heurreg/summation.hpp"

#include <cmath>
#include <limits>

namespace heurreg {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw parameter_error(msg);
}

void check_lengths(const SpectralProblem& problem, const std::vector<double>& data,
                   const char* who) {
    if (data.size() != problem.size())
        throw parameter_error(std::string(who) + ": data length must match the problem dimension");
}

void check_alpha_positive(double alpha, const char* who) {
    if (!(std::isfinite(alpha) && alpha > 0.0))
        throw parameter_error(std::string(who) + ": alpha must be > 0");
}

// psi functionals live on (0, lambda_1]; larger alpha is outside the curve domain.
void check_alpha_domain(const SpectralProblem& problem, double alpha, const char* who) {
    check_alpha_positive(alpha, who);
    if (alpha > problem.eigenvalues.front())
        throw parameter_error(std::string(who) + ": alpha must lie in (0, lambda_1]");
}

} // namespace

std::string to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::QO: return "QO";
        case RuleKind::HD: return "HD";
        case RuleKind::HR: return "HR";
        case RuleKind::PMS: return "PMS";
        case RuleKind::GCV: return "GCV";
        case RuleKind::Residual: return "Residual";
    }
    throw parameter_error("to_string: unknown rule kind");
}

RuleKind rule_kind_from_string(const std::string& name) {
    if (name == "QO") return RuleKind::QO;
    if (name == "HD") return RuleKind::HD;
    if (name == "HR") return RuleKind::HR;
    if (name == "PMS") return RuleKind::PMS;
    if (name == "GCV") return RuleKind::GCV;
    if (name == "Residual") return RuleKind::Residual;
    throw parameter_error("unknown rule '" + name +
                          "' (expected QO, HD, HR, PMS, GCV, or Residual)");
}

RuleSpec make_rule(RuleKind kind, std::optional<double> q, double p) {
    require(std::isfinite(p) && p >= 0.0 && p <= 0.5, "make_rule: p must lie in [0, 1/2]");
    RuleSpec rule;
    rule.kind = kind;
    rule.p = p;
    if (kind == RuleKind::HD || kind == RuleKind::HR) {
        if (!q) throw parameter_error("make_rule: " + to_string(kind) + " requires q");
        require(std::isfinite(*q), "make_rule: q must be finite");
        if (*q < p)
            throw parameter_error(to_string(kind) + " requires q ≥ p (got q = " +
                                  std::to_string(*q) + ", p = " + std::to_string(p) + ")");
        rule.q = *q;
    } else if (q) {
        throw parameter_error("make_rule: " + to_string(kind) + " does not take q");
    }
    return rule;
}

std::vector<double> tikhonov(const SpectralProblem& problem,
                             const std::vector<double>& data, double alpha) {
    check_lengths(problem, data, "tikhonov");
    check_alpha_positive(alpha, "tikhonov");
    std::vector<double> x(problem.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lam = problem.eigenvalues[i];
        x[i] = std::sqrt(lam) * data[i] / (lam + alpha);
    }
    return x;
}

std::vector<double> second_tikhonov(const SpectralProblem& problem,
                                    const std::vector<double>& data, double alpha) {
    check_lengths(problem, data, "second_tikhonov");
    check_alpha_positive(alpha, "second_tikhonov");
    std::vector<double> x(problem.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lam = problem.eigenvalues[i];
        double u = lam + alpha;
        x[i] = std::sqrt(lam) * data[i] * (lam + 2.0 * alpha) / (u * u);
    }
    return x;
}

namespace detail {

double psi_weighted(RuleKind kind, double q, const SpectralProblem& problem,
                    const double* lam2q, const std::vector<double>& data, double alpha) {
    const auto& lam = problem.eigenvalues;
    const std::size_t n = lam.size();
    compensated_sum acc;
    switch (kind) {
        case RuleKind::QO: {
            double a2 = alpha * alpha;
            for (std::size_t i = 0; i < n; ++i) {
                double u = lam[i] + alpha;
                double u2 = u * u;
                acc.add(a2 * lam[i] * data[i] * data[i] / (u2 * u2));
            }
            return std::sqrt(acc.value());
        }
        case RuleKind::HD: {
            for (std::size_t i = 0; i < n; ++i) {
                double w = lam2q ? lam2q[i] : (q == 0.0 ? 1.0 : std::pow(lam[i], 2.0 * q));
                double u = lam[i] + alpha;
                acc.add(w * data[i] * data[i] / (u * u));
            }
            return std::sqrt(std::pow(alpha, 1.0 - 2.0 * q) * acc.value());
        }
        case RuleKind::HR: {
            for (std::size_t i = 0; i < n; ++i) {
                double w = lam2q ? lam2q[i] : (q == 0.0 ? 1.0 : std::pow(lam[i], 2.0 * q));
                double u = lam[i] + alpha;
                acc.add(w * data[i] * data[i] / (u * u * u));
            }
            return std::sqrt(std::pow(alpha, 2.0 - 2.0 * q) * acc.value());
        }
        case RuleKind::Residual: {
            double a2 = alpha * alpha;
            for (std::size_t i = 0; i < n; ++i) {
                double u = lam[i] + alpha;
                acc.add(a2 * data[i] * data[i] / (u * u));
            }
            return std::sqrt(acc.value());
        }
        default:
            throw usage_error("psi is undefined for rule " + to_string(kind) +
                              "; use psi_pms or psi_gcv");
    }
}

} // namespace detail

double psi(const RuleSpec& rule, const SpectralProblem& problem,
           const std::vector<double>& data, double alpha) {
    check_lengths(problem, data, "psi");
    check_alpha_domain(problem, alpha, "psi");
    return detail::psi_weighted(rule.kind, rule.q, problem, nullptr, data, alpha);
}

double psi_via_definition(const RuleSpec& rule, const SpectralProblem& problem,
                          const std::vector<double>& data, double alpha,
                          double fd_rel_step) {
    check_lengths(problem, data, "psi_via_definition");
    check_alpha_domain(problem, alpha, "psi_via_definition");
    require(std::isfinite(fd_rel_step) && fd_rel_step > 0.0 && fd_rel_step < 1.0,
            "psi_via_definition: fd_rel_step must lie in (0, 1)");

    const auto& lam = problem.eigenvalues;
    const std::size_t n = lam.size();

    switch (rule.kind) {
        case RuleKind::QO: {
            // psi = alpha ||dx/dalpha||, central difference at alpha(1 +/- h)
            double h = fd_rel_step;
            auto xp = tikhonov(problem, data, alpha * (1.0 + h));
            auto xm = tikhonov(problem, data, alpha * (1.0 - h));
            compensated_sum acc;
            for (std::size_t i = 0; i < n; ++i) {
                double diff = xp[i] - xm[i];
                acc.add(diff * diff);
            }
            return std::sqrt(acc.value()) / (2.0 * h);
        }
        case RuleKind::HD: {
            // psi = alpha^-(q+1/2) ||(T T*)^q (T x_alpha - y_delta)||
            auto x = tikhonov(problem, data, alpha);
            compensated_sum acc;
            for (std::size_t i = 0; i < n; ++i) {
                double r = std::sqrt(lam[i]) * x[i] - data[i];
                double w = rule.q == 0.0 ? 1.0 : std::pow(lam[i], 2.0 * rule.q);
                acc.add(w * r * r);
            }
            return std::pow(alpha, -(rule.q + 0.5)) * std::sqrt(acc.value());
        }
        case RuleKind::HR: {
            // psi = alpha^-(q+1/2) <(T T*)^q r2, (T T*)^q r1>^(1/2)
            auto x1 = tikhonov(problem, data, alpha);
            auto x2 = second_tikhonov(problem, data, alpha);
            compensated_sum acc;
            for (std::size_t i = 0; i < n; ++i) {
                double s = std::sqrt(lam[i]);
                double r1 = s * x1[i] - data[i];
                double r2 = s * x2[i] - data[i];
                double w = rule.q == 0.0 ? 1.0 : std::pow(lam[i], 2.0 * rule.q);
                acc.add(w * r2 * r1);
            }
            double ip = acc.value();
            if (ip < 0.0) ip = 0.0; // exact inner product is positive; guard rounding
            return std::pow(alpha, -(rule.q + 0.5)) * std::sqrt(ip);
        }
        case RuleKind::Residual: {
            auto x = tikhonov(problem, data, alpha);
            compensated_sum acc;
            for (std::size_t i = 0; i < n; ++i) {
                double r = std::sqrt(lam[i]) * x[i] - data[i];
                acc.add(r * r);
            }
            return std::sqrt(acc.value());
        }
        default:
            throw usage_error("psi_via_definition is undefined for rule " +
                              to_string(rule.kind) + "; use psi_pms or psi_gcv");
    }
}

double psi_pms(const SpectralProblem& problem, const std::vector<double>& data,
               const std::vector<double>& exact_data, double alpha) {
    check_lengths(problem, data, "psi_pms");
    if (exact_data.size() != problem.size())
        throw parameter_error("psi_pms: exact data length must match the problem dimension");
    check_alpha_positive(alpha, "psi_pms");
    compensated_sum acc;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double lam = problem.eigenvalues[i];
        double r = lam * data[i] / (lam + alpha) - exact_data[i];
        acc.add(r * r);
    }
    return std::sqrt(acc.value());
}

double rho(const SpectralProblem& problem, double alpha) {
    check_alpha_positive(alpha, "rho");
    compensated_sum acc;
    for (double lam : problem.eigenvalues) acc.add(alpha / (lam + alpha));
    return acc.value() / static_cast<double>(problem.size());
}

double psi_gcv(const SpectralProblem& problem, const std::vector<double>& data,
               double alpha) {
    check_lengths(problem, data, "psi_gcv");
    check_alpha_positive(alpha, "psi_gcv");
    compensated_sum acc;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double f = alpha / (problem.eigenvalues[i] + alpha);
        acc.add(f * f * data[i] * data[i]);
    }
    double num = std::sqrt(acc.value());
    double w = rho(problem, alpha);
    if (w <= 0.0) return std::numeric_limits<double>::infinity();
    return num / w;
}

ErrorMetrics error_metrics(const SpectralProblem& problem,
                           const NoiseRealization& noise, double alpha) {
    if (noise.size() != problem.size())
        throw parameter_error("error_metrics: noise length must match the problem dimension");
    check_alpha_positive(alpha, "error_metrics");

    compensated_sum s_err, s_data, s_bias, s_err_t, s_data_t, s_bias_t;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double lam = problem.eigenvalues[i];
        double sig = std::sqrt(lam);
        double u = lam + alpha;
        double data_part = sig * noise.coefficients[i] / u;
        double bias_part = sig * problem.exact_data[i] / u - problem.solution[i];
        double err_part = data_part + bias_part;
        s_err.add(err_part * err_part);
        s_data.add(data_part * data_part);
        s_bias.add(bias_part * bias_part);
        s_err_t.add(lam * err_part * err_part);
        s_data_t.add(lam * data_part * data_part);
        s_bias_t.add(lam * bias_part * bias_part);
    }

    ErrorMetrics m;
    m.err_x = std::sqrt(s_err.value());
    m.data_err = std::sqrt(s_data.value());
    m.bias = std::sqrt(s_bias.value());
    m.err_T = std::sqrt(s_err_t.value());
    m.data_err_T = std::sqrt(s_data_t.value());
    m.bias_T = std::sqrt(s_bias_t.value());
    return m;
}

} // namespace heurreg

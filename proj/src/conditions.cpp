#include "heurreg/conditions.hpp"

#include "heurreg/errors.hpp"
#include "heurreg/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heurreg {

namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw parameter_error(msg);
}

std::size_t top_index(const SpectralProblem& problem) {
    // 1-based ceil(N/10), converted to a 0-based index
    return (problem.size() + 9) / 10 - 1;
}

// prefix[k] = sum of terms[0..k), accumulated downward in eigenvalue order
std::vector<double> prefix_sums(const std::vector<double>& terms) {
    std::vector<double> out(terms.size() + 1);
    compensated_sum acc;
    out[0] = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        acc.add(terms[i]);
        out[i + 1] = acc.value();
    }
    return out;
}

// suffix[k] = sum of terms[k..N), accumulated from the smallest eigenvalue up
std::vector<double> suffix_sums(const std::vector<double>& terms) {
    std::vector<double> out(terms.size() + 1);
    compensated_sum acc;
    out[terms.size()] = 0.0;
    for (std::size_t i = terms.size(); i-- > 0;) {
        acc.add(terms[i]);
        out[i] = acc.value();
    }
    return out;
}

// first index whose eigenvalue is <= alpha (strict split) or < alpha
// (inclusive split), on the descending eigenvalue array
std::size_t split_index(const std::vector<double>& lam, double alpha, bool inclusive) {
    auto pred = [&](double v) { return inclusive ? v >= alpha : v > alpha; };
    return static_cast<std::size_t>(
        std::partition_point(lam.begin(), lam.end(), pred) - lam.begin());
}

double ratio_sup(double lhs, double rhs) {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : k_inf;
    return lhs / rhs;
}

double ratio_inf(double lhs, double rhs) {
    if (rhs == 0.0) return k_inf; // nothing to dominate: trivially satisfied
    return lhs / rhs;
}

ConditionReport finalize_sup(ConditionReport report) {
    report.sup_type = true;
    double sup = 0.0;
    for (double r : report.ratios) sup = std::max(sup, r);
    report.constant = sup;
    report.satisfied = std::isfinite(sup);
    return report;
}

ConditionReport finalize_inf(ConditionReport report) {
    report.sup_type = false;
    double inf = k_inf;
    for (double r : report.ratios) inf = std::min(inf, r);
    report.constant = inf;
    report.satisfied = inf > 0.0;
    return report;
}

ConditionReport lower_noise_mass(std::string id, const SpectralProblem& problem,
                                 const NoiseRealization& noise,
                                 double p, double epsilon, const AlphaGrid& grid) {
    require(noise.size() == problem.size(),
            id + ": noise length must match the problem dimension");
    require(std::isfinite(p) && p > 0.0 && p <= 0.5, id + ": requires 0 < p <= 1/2");
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 2.0 * p,
            id + ": requires 0 < epsilon < 2p");

    ConditionReport report;
    report.id = std::move(id);
    report.alphas = grid.points;

    double eta = eta_of(noise.coefficients, problem, p);
    if (eta == 0.0) {
        report.degenerate = true;
        report.satisfied = false;
        report.note = "noise is identically zero; the condition carries no information";
        report.ratios.assign(grid.size(), 0.0);
        report.constant = 0.0;
        return report;
    }

    std::vector<double> terms(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i)
        terms[i] = noise.coefficients[i] * noise.coefficients[i];
    auto prefix = prefix_sums(terms);

    double eta2 = eta * eta;
    report.ratios.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double a = grid.points[k];
        std::size_t cut = split_index(problem.eigenvalues, a, /*inclusive=*/true);
        // ratio against the bound eta^2 / alpha^(2p - eps)
        report.ratios[k] = prefix[cut] * std::pow(a, 2.0 * p - epsilon) / eta2;
    }
    return finalize_inf(std::move(report));
}

ConditionReport lower_source_mass(std::string id, const SpectralProblem& problem,
                                  double mu, double epsilon2, const AlphaGrid& grid) {
    require(!problem.source.empty(), id + ": problem carries no source weights");
    require(std::isfinite(mu) && mu >= 0.0 && mu <= 1.0, id + ": mu must lie in [0, 1]");
    require(std::isfinite(epsilon2) && epsilon2 > 0.0, id + ": requires epsilon2 > 0");

    ConditionReport report;
    report.id = std::move(id);
    report.alphas = grid.points;

    std::vector<double> terms(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double w = problem.source[i];
        terms[i] = std::pow(problem.eigenvalues[i], 2.0 * mu - 1.0) * w * w;
    }
    auto prefix = prefix_sums(terms);

    report.ratios.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double a = grid.points[k];
        std::size_t cut = split_index(problem.eigenvalues, a, /*inclusive=*/true);
        report.ratios[k] = prefix[cut] / std::pow(a, 2.0 * mu - 1.0 + epsilon2);
    }
    return finalize_inf(std::move(report));
}

} // namespace

AlphaGrid make_condition_grid(const SpectralProblem& problem, std::size_t count) {
    require(problem.size() >= 2, "make_condition_grid: needs at least two eigenvalues");
    double top = std::sqrt(problem.eigenvalues[0] * problem.eigenvalues[1]);
    double bottom = problem.eigenvalues[top_index(problem)];
    require(bottom < top, "make_condition_grid: dimension too small to span a grid");
    return make_geometric_grid(top, bottom, count);
}

AlphaGrid make_one_sided_condition_grid(const SpectralProblem& problem, std::size_t count) {
    double top = problem.eigenvalues.front();
    double bottom = problem.eigenvalues[top_index(problem)];
    require(bottom < top, "make_one_sided_condition_grid: dimension too small to span a grid");
    return make_geometric_grid(top, bottom, count);
}

ConditionReport check_noise_condition(const SpectralProblem& problem,
                                      const NoiseRealization& noise,
                                      double nu, const AlphaGrid& grid) {
    require(noise.size() == problem.size(),
            "check_noise_condition: noise length must match the problem dimension");
    require(std::isfinite(nu) && nu >= 0.0, "check_noise_condition: nu must be >= 0");

    ConditionReport report;
    report.id = "N_nu";
    report.alphas = grid.points;

    const auto& lam = problem.eigenvalues;
    std::vector<double> upper_terms(problem.size()), lower_terms(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double e2 = noise.coefficients[i] * noise.coefficients[i];
        upper_terms[i] = e2 / lam[i];
        lower_terms[i] = (nu == 0.0 ? 1.0 : std::pow(lam[i], nu)) * e2;
    }
    auto prefix = prefix_sums(upper_terms);
    auto suffix = suffix_sums(lower_terms);

    report.ratios.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double a = grid.points[k];
        std::size_t cut = split_index(lam, a, /*inclusive=*/false);
        double lhs = std::pow(a, nu + 1.0) * prefix[cut];
        report.ratios[k] = ratio_sup(lhs, suffix[cut]);
    }
    return finalize_sup(std::move(report));
}

ConditionReport check_regularity_condition(const SpectralProblem& problem,
                                           const AlphaGrid& grid) {
    ConditionReport report;
    report.id = "regularity";
    report.alphas = grid.points;

    const auto& lam = problem.eigenvalues;
    std::vector<double> upper_terms(problem.size()), lower_terms(problem.size());
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double x2 = problem.solution[i] * problem.solution[i];
        upper_terms[i] = x2 / (lam[i] * lam[i]);
        lower_terms[i] = x2;
    }
    auto prefix = prefix_sums(upper_terms);
    auto suffix = suffix_sums(lower_terms);

    report.ratios.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double a = grid.points[k];
        std::size_t cut = split_index(lam, a, /*inclusive=*/false);
        double lhs = a * a * prefix[cut];
        report.ratios[k] = ratio_inf(lhs, suffix[cut]);
    }
    return finalize_inf(std::move(report));
}

ConditionReport check_pms_noise_condition(const SpectralProblem& problem,
                                          const NoiseRealization& noise,
                                          double p, double epsilon, const AlphaGrid& grid) {
    return lower_noise_mass("pms_noise", problem, noise, p, epsilon, grid);
}

ConditionReport check_source_tightness_condition(const SpectralProblem& problem,
                                                 double mu, double epsilon2,
                                                 const AlphaGrid& grid) {
    return lower_source_mass("source_tightness", problem, mu, epsilon2, grid);
}

ConditionReport check_gcv_noise_condition(const SpectralProblem& problem,
                                          const NoiseRealization& noise,
                                          double p, double epsilon, const AlphaGrid& grid) {
    return lower_noise_mass("gcv_noise", problem, noise, p, epsilon, grid);
}

ConditionReport check_gcv_regularity_condition(const SpectralProblem& problem,
                                               double mu, double epsilon2,
                                               const AlphaGrid& grid) {
    return lower_source_mass("gcv_regularity", problem, mu, epsilon2, grid);
}

StabilityProbe assess_n_stability(const std::function<double(std::size_t)>& constant_at,
                                  const std::vector<std::size_t>& sizes,
                                  double step_tolerance) {
    require(sizes.size() >= 2, "assess_n_stability: needs at least two sizes");
    for (std::size_t k = 1; k < sizes.size(); ++k)
        require(sizes[k] > sizes[k - 1], "assess_n_stability: sizes must be increasing");
    require(std::isfinite(step_tolerance) && step_tolerance > 0.0,
            "assess_n_stability: step_tolerance must be > 0");

    StabilityProbe probe;
    probe.sizes = sizes;
    probe.constants.reserve(sizes.size());
    for (std::size_t n : sizes) probe.constants.push_back(constant_at(n));

    probe.stable = true;
    for (std::size_t k = 1; k < probe.constants.size(); ++k) {
        double prev = probe.constants[k - 1], cur = probe.constants[k];
        double step;
        if (!std::isfinite(prev) || !std::isfinite(cur)) {
            step = k_inf;
        } else if (prev == 0.0) {
            step = cur == 0.0 ? 0.0 : k_inf;
        } else {
            step = std::abs(cur - prev) / std::abs(prev);
        }
        probe.steps.push_back(step);
        if (!(step < step_tolerance)) probe.stable = false;
    }
    return probe;
}

} // namespace heurreg

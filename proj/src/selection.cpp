#include "heurreg/selection.hpp"

#include "heurreg/errors.hpp"
#include "heurreg/parallel.hpp"

#include <cmath>
#include <limits>

namespace heurreg {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw parameter_error(msg);
}

void check_grid(const AlphaGrid& grid, const char* who) {
    require(grid.size() >= 1, std::string(who) + ": grid must be non-empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double a : grid.points) {
        require(std::isfinite(a) && a > 0.0, std::string(who) + ": grid points must be > 0");
        require(a < prev, std::string(who) + ": grid must be strictly decreasing");
        prev = a;
    }
}

} // namespace

AlphaGrid make_geometric_grid(double alpha_max, double alpha_min, std::size_t count) {
    require(std::isfinite(alpha_max) && alpha_max > 0.0,
            "make_geometric_grid: alpha_max must be > 0");
    require(std::isfinite(alpha_min) && alpha_min > 0.0,
            "make_geometric_grid: alpha_min must be > 0");
    require(alpha_min < alpha_max, "make_geometric_grid: alpha_min must be < alpha_max");
    require(count >= 2, "make_geometric_grid: count must be >= 2");

    AlphaGrid grid;
    grid.points.resize(count);
    double ratio = std::pow(alpha_min / alpha_max, 1.0 / static_cast<double>(count - 1));
    for (std::size_t i = 0; i < count; ++i)
        grid.points[i] = alpha_max * std::pow(ratio, static_cast<double>(i));
    return grid;
}

AlphaGrid make_alpha_grid(const SpectralProblem& problem, std::size_t count,
                          std::optional<double> alpha_min_override) {
    double alpha_max = problem.eigenvalues.front();
    double alpha_min = std::max(problem.eigenvalues.back(), 1e-12);
    if (alpha_min_override) alpha_min = *alpha_min_override;
    return make_geometric_grid(alpha_max, alpha_min, count);
}

std::string to_string(SelectionFlag flag) {
    switch (flag) {
        case SelectionFlag::interior: return "interior";
        case SelectionFlag::at_min_edge: return "at_min_edge";
        case SelectionFlag::at_max_edge: return "at_max_edge";
    }
    throw parameter_error("to_string: unknown selection flag");
}

std::vector<double> psi_curve(const RuleSpec& rule, const SpectralProblem& problem,
                              const std::vector<double>& data, const AlphaGrid& grid,
                              unsigned workers) {
    check_grid(grid, "psi_curve");
    if (data.size() != problem.size())
        throw parameter_error("psi_curve: data length must match the problem dimension");

    bool filter_rule = rule.kind == RuleKind::QO || rule.kind == RuleKind::HD ||
                       rule.kind == RuleKind::HR || rule.kind == RuleKind::Residual;
    if (filter_rule && grid.points.front() > problem.eigenvalues.front())
        throw parameter_error("psi_curve: grid exceeds lambda_1, outside the domain of psi");

    // hoist the q-power out of the per-alpha loops
    std::vector<double> lam2q;
    const double* weights = nullptr;
    if ((rule.kind == RuleKind::HD || rule.kind == RuleKind::HR) && rule.q != 0.0) {
        lam2q.resize(problem.size());
        for (std::size_t i = 0; i < problem.size(); ++i)
            lam2q[i] = std::pow(problem.eigenvalues[i], 2.0 * rule.q);
        weights = lam2q.data();
    }

    std::vector<double> values(grid.size());
    parallel_for(grid.size(), resolve_workers(workers), [&](std::size_t k) {
        double a = grid.points[k];
        switch (rule.kind) {
            case RuleKind::PMS:
                values[k] = psi_pms(problem, data, problem.exact_data, a);
                break;
            case RuleKind::GCV:
                values[k] = psi_gcv(problem, data, a);
                break;
            default:
                values[k] = detail::psi_weighted(rule.kind, rule.q, problem, weights, data, a);
                break;
        }
    });
    return values;
}

SelectionResult select_from_curve(const std::vector<double>& values, const AlphaGrid& grid) {
    check_grid(grid, "select_from_curve");
    if (values.size() != grid.size())
        throw parameter_error("select_from_curve: curve length must match the grid");

    bool found = false;
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) continue; // excluded candidate
        // <= moves ties toward later (smaller) alphas on the descending grid
        if (!found || values[k] <= best_value) {
            found = true;
            best = k;
            best_value = values[k];
        }
    }
    if (!found) throw selection_failed("select_alpha: every candidate value was non-finite");

    SelectionResult result;
    result.alpha_star = grid.points[best];
    result.psi_star = best_value;
    result.index = best;
    if (best == 0)
        result.flag = SelectionFlag::at_max_edge;
    else if (best + 1 == grid.size())
        result.flag = SelectionFlag::at_min_edge;
    else
        result.flag = SelectionFlag::interior;
    return result;
}

SelectionResult select_alpha(const RuleSpec& rule, const SpectralProblem& problem,
                             const std::vector<double>& data, const AlphaGrid& grid,
                             unsigned workers) {
    return select_from_curve(psi_curve(rule, problem, data, grid, workers), grid);
}

double apriori_optimal_alpha(double eta, double mu, double p, double c) {
    require(std::isfinite(eta) && eta > 0.0, "apriori_optimal_alpha: eta must be > 0");
    require(std::isfinite(mu) && mu >= 0.0 && mu <= 1.0,
            "apriori_optimal_alpha: mu must lie in [0, 1]");
    require(std::isfinite(p) && p >= 0.0 && p <= 0.5,
            "apriori_optimal_alpha: p must lie in [0, 1/2]");
    require(std::isfinite(c) && c > 0.0, "apriori_optimal_alpha: c must be > 0");
    return c * std::pow(eta, 2.0 / (2.0 * mu + 2.0 * p + 1.0));
}

} // namespace heurreg

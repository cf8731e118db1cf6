#pragma once

#include "heurreg/functionals.hpp"
#include "heurreg/spectral_model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace heurreg {

// Geometric candidate grid, stored in strictly decreasing order.
struct AlphaGrid {
    std::vector<double> points;

    std::size_t size() const { return points.size(); }
};

// Geometric grid of `count` points from alpha_max down to alpha_min.
// Requires count >= 2 and 0 < alpha_min < alpha_max.
AlphaGrid make_geometric_grid(double alpha_max, double alpha_min, std::size_t count);

// Default grid for a problem: alpha_max = lambda_1,
// alpha_min = max(lambda_N, 1e-12) unless overridden.
AlphaGrid make_alpha_grid(const SpectralProblem& problem, std::size_t count = 400,
                          std::optional<double> alpha_min_override = std::nullopt);

enum class SelectionFlag { interior, at_min_edge, at_max_edge };

std::string to_string(SelectionFlag flag);

struct SelectionResult {
    double alpha_star = 0.0;
    double psi_star = 0.0;
    SelectionFlag flag = SelectionFlag::interior;
    std::size_t index = 0; // position of alpha_star in the grid
};

// Rule functional evaluated over the whole grid (PMS reads exact data from
// the problem, GCV divides by the trace weight).  Evaluations at distinct
// grid points are independent, so they run under a static-partition parallel
// loop; results are identical for every worker count.
std::vector<double> psi_curve(const RuleSpec& rule, const SpectralProblem& problem,
                              const std::vector<double>& data, const AlphaGrid& grid,
                              unsigned workers = 0);

// Grid minimizer of the rule functional.  Non-finite values are excluded;
// ties resolve toward the smaller alpha; the flag reports whether the
// minimizer sits in the interior or at a grid edge.  Throws selection_failed
// when no candidate is finite.
SelectionResult select_alpha(const RuleSpec& rule, const SpectralProblem& problem,
                             const std::vector<double>& data, const AlphaGrid& grid,
                             unsigned workers = 0);

// Same scan against an already evaluated curve.
SelectionResult select_from_curve(const std::vector<double>& values, const AlphaGrid& grid);

// Oracle reference choice alpha = c * eta^(2 / (2 mu + 2 p + 1)).
// Requires eta > 0, 0 <= mu <= 1, 0 <= p <= 1/2, c > 0.
double apriori_optimal_alpha(double eta, double mu, double p, double c = 1.0);

} // namespace heurreg

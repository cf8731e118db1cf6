#pragma once

#include "heurreg/spectral_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace heurreg {

// Parameter-choice rules.  QO minimizes alpha * ||dx/dalpha||, HD and HR are
// weighted-residual variants with a smoothing exponent q, PMS minimizes the
// predictive risk against exact data, GCV divides the residual norm by a trace
// weight, and Residual is the plain discrepancy functional.
enum class RuleKind { QO, HD, HR, PMS, GCV, Residual };

std::string to_string(RuleKind kind);
RuleKind rule_kind_from_string(const std::string& name);

struct RuleSpec {
    RuleKind kind = RuleKind::QO;
    double q = 0.0; // weighting exponent; meaningful for HD/HR only
    double p = 0.0; // weak-noise exponent the rule is tuned against
};

// Validates and assembles a RuleSpec.  HD/HR require q with q >= p; the other
// kinds reject an explicit q.  p must lie in [0, 1/2].
RuleSpec make_rule(RuleKind kind, std::optional<double> q = std::nullopt, double p = 0.0);

// Tikhonov minimizer coefficients x_i = sqrt(lambda_i) d_i / (lambda_i + alpha).
// Requires alpha > 0 and matching lengths.
std::vector<double> tikhonov(const SpectralProblem& problem,
                             const std::vector<double>& data, double alpha);

// Second Tikhonov iterate, closed form
// x2_i = sqrt(lambda_i) d_i (lambda_i + 2 alpha) / (lambda_i + alpha)^2,
// identical to re-solving with the first iterate as prior.
std::vector<double> second_tikhonov(const SpectralProblem& problem,
                                    const std::vector<double>& data, double alpha);

// Spectral-filter route for the rule functionals:
//   psi(alpha)^2 = sum_i Psi_alpha(lambda_i) d_i^2
// with Psi chosen by the rule.  Defined for QO, HD, HR, Residual on
// alpha in (0, lambda_1]; PMS/GCV route to their own functionals and a call
// here is a usage error.
double psi(const RuleSpec& rule, const SpectralProblem& problem,
           const std::vector<double>& data, double alpha);

// Definition route for the same functionals, deliberately built from solver
// outputs rather than closed-form filters: QO by central differencing of the
// regularized solution (relative step fd_rel_step), HD/HR from weighted
// residuals of the first and second iterates.  Kept independent of psi() so
// the two can cross-check each other.
double psi_via_definition(const RuleSpec& rule, const SpectralProblem& problem,
                          const std::vector<double>& data, double alpha,
                          double fd_rel_step = 1e-6);

// Predictive risk functional psi_PMS(alpha)^2 = sum_i
// (lambda_i d_i / (lambda_i + alpha) - y_i)^2 against explicit exact data y.
double psi_pms(const SpectralProblem& problem, const std::vector<double>& data,
               const std::vector<double>& exact_data, double alpha);

// Trace weight rho(alpha) = (1/N) sum_i alpha / (lambda_i + alpha), in (0, 1],
// non-decreasing in alpha.
double rho(const SpectralProblem& problem, double alpha);

// GCV functional: residual norm divided by rho(alpha).  A vanishing weight
// (underflow) yields +infinity rather than a division by zero.
double psi_gcv(const SpectralProblem& problem, const std::vector<double>& data,
               double alpha);

struct ErrorMetrics {
    double err_x = 0.0;      // ||x_alpha(y + e) - xdag||
    double data_err = 0.0;   // ||x_alpha(y + e) - x_alpha(y)||
    double bias = 0.0;       // ||x_alpha(y) - xdag||
    double err_T = 0.0;      // same three, measured in ||T . || = sqrt(lambda)-weighted norm
    double data_err_T = 0.0;
    double bias_T = 0.0;
};

// Exact decomposition of the regularization error at alpha for the data
// y + e.  Requires alpha > 0 and matching lengths.
ErrorMetrics error_metrics(const SpectralProblem& problem,
                           const NoiseRealization& noise, double alpha);

namespace detail {

// Shared filter kernel.  lam2q may point to precomputed lambda^(2q) values
// (length N); pass nullptr to evaluate the power term on the fly.  Callers
// evaluating many alphas against a fixed q precompute once.
double psi_weighted(RuleKind kind, double q, const SpectralProblem& problem,
                    const double* lam2q, const std::vector<double>& data, double alpha);

} // namespace detail

} // namespace heurreg

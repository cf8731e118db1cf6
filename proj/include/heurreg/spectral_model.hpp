#pragma once

#include <cstdint>
#include <cstddef>
#include <optional>
#include <vector>

namespace heurreg {

// Diagonal sequence-space model for a compact operator T: the singular value
// decomposition reduces T*T to multiplication by eigenvalues lambda_i, stored
// strictly positive and non-increasing.  All coefficient vectors below are
// expansions in the corresponding singular basis.

struct PolynomialParams {
    double gamma = 0.0; // eigenvalue decay: lambda_i = i^(-gamma)
    double mu = 0.0;    // smoothness: xdag_i = lambda_i^mu * omega_i
    double s = 0.0;     // source decay: omega_i = i^(-s/2)
};

struct SpectralProblem {
    std::vector<double> eigenvalues; // lambda_i > 0, non-increasing
    std::vector<double> solution;    // xdag_i
    std::vector<double> exact_data;  // y_i = sqrt(lambda_i) * xdag_i
    std::vector<double> source;      // omega_i; empty when no source expansion is known
    std::optional<PolynomialParams> params; // set when built from the polynomial family

    std::size_t size() const { return eigenvalues.size(); }
};

enum class SignPattern {
    alternating,  // +, -, +, -, ... starting with +
    seeded_random // iid +/-1 from a seeded 64-bit Mersenne twister, one draw per index
};

struct NoiseGenerationParams {
    double beta = 0.0; // magnitude decay: |e_i| = sqrt(tau) * i^(-beta/2)
    double tau = 1.0;
    SignPattern signs = SignPattern::alternating;
    std::uint64_t seed = 0;
};

struct NoiseRealization {
    std::vector<double> coefficients; // e_i
    double p = 0.0;                   // weak-norm exponent in [0, 1/2]
    double eta = 0.0;                 // (sum lambda_i^(2p) e_i^2)^(1/2)
    double delta = 0.0;               // plain l2 norm of e
    std::optional<NoiseGenerationParams> params; // set when synthetic

    std::size_t size() const { return coefficients.size(); }
};

// Builds the polynomial test family: lambda_i = i^(-gamma), omega_i = i^(-s/2),
// xdag_i = lambda_i^mu * omega_i, y_i = sqrt(lambda_i) * xdag_i, for i = 1..n.
// Requires gamma > 0, n >= 1, 0 <= mu <= 1, s > 1.
SpectralProblem build_polynomial_problem(double gamma, std::size_t n, double mu, double s);

// Assembles a problem from explicit coefficient arrays, deriving exact data
// and validating the eigenvalue ordering.  `source` may be empty.
SpectralProblem make_problem(std::vector<double> eigenvalues,
                             std::vector<double> solution,
                             std::vector<double> source = {});

// Polynomial noise: |e_i| = sqrt(tau) * i^(-beta/2) with the requested sign
// pattern.  The result carries p = 0, so eta equals delta until the noise is
// rescaled against a problem.  Requires beta >= 0, tau > 0, n >= 1.
NoiseRealization build_polynomial_noise(double beta, double tau, std::size_t n,
                                        SignPattern signs = SignPattern::alternating,
                                        std::uint64_t seed = 0);

// Wraps explicit coefficients; eta is computed against `p` and `problem`.
NoiseRealization make_noise(std::vector<double> coefficients,
                            const SpectralProblem& problem, double p);

// Weak noise norm (sum lambda_i^(2p) e_i^2)^(1/2), accumulated in stored
// (descending eigenvalue) order.  Requires matching lengths and 0 <= p <= 1/2.
double eta_of(const std::vector<double>& coefficients, const SpectralProblem& problem, double p);

// Strong norm ||e||.
double delta_of(const std::vector<double>& coefficients);

// Returns a copy of `noise` scaled so that its weak norm at exponent `p`
// equals eta_target (> 0).  Throws degenerate_input when the noise is
// identically zero.
NoiseRealization scale_noise_to_eta(const NoiseRealization& noise,
                                    const SpectralProblem& problem,
                                    double p, double eta_target);

} // namespace heurreg

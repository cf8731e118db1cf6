#include "heurreg/spectral_model.hpp"

#include "heurreg/errors.hpp"
#include "heurreg/summation.hpp"

#include <cmath>
#include <random>
#include <string>

namespace heurreg {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw parameter_error(msg);
}

} // namespace

SpectralProblem build_polynomial_problem(double gamma, std::size_t n, double mu, double s) {
    require(std::isfinite(gamma) && gamma > 0.0, "build_polynomial_problem: gamma must be > 0");
    require(n >= 1, "build_polynomial_problem: n must be >= 1");
    require(std::isfinite(mu) && mu >= 0.0 && mu <= 1.0,
            "build_polynomial_problem: mu must lie in [0, 1]");
    require(std::isfinite(s) && s > 1.0, "build_polynomial_problem: s must be > 1");

    SpectralProblem prob;
    prob.eigenvalues.resize(n);
    prob.solution.resize(n);
    prob.exact_data.resize(n);
    prob.source.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double i = static_cast<double>(k + 1);
        double lam = std::pow(i, -gamma);
        double omega = std::pow(i, -s / 2.0);
        double xdag = std::pow(lam, mu) * omega;
        prob.eigenvalues[k] = lam;
        prob.source[k] = omega;
        prob.solution[k] = xdag;
        prob.exact_data[k] = std::sqrt(lam) * xdag;
    }
    prob.params = PolynomialParams{gamma, mu, s};
    return prob;
}

SpectralProblem make_problem(std::vector<double> eigenvalues,
                             std::vector<double> solution,
                             std::vector<double> source) {
    require(!eigenvalues.empty(), "make_problem: at least one eigenvalue required");
    require(eigenvalues.size() == solution.size(),
            "make_problem: eigenvalues and solution must have equal length");
    require(source.empty() || source.size() == eigenvalues.size(),
            "make_problem: source must be empty or match the eigenvalue count");
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        require(std::isfinite(eigenvalues[k]) && eigenvalues[k] > 0.0,
                "make_problem: eigenvalues must be strictly positive");
        if (k > 0)
            require(eigenvalues[k] <= eigenvalues[k - 1],
                    "make_problem: eigenvalues must be non-increasing");
    }

    SpectralProblem prob;
    prob.exact_data.resize(eigenvalues.size());
    for (std::size_t k = 0; k < eigenvalues.size(); ++k)
        prob.exact_data[k] = std::sqrt(eigenvalues[k]) * solution[k];
    prob.eigenvalues = std::move(eigenvalues);
    prob.solution = std::move(solution);
    prob.source = std::move(source);
    return prob;
}

NoiseRealization build_polynomial_noise(double beta, double tau, std::size_t n,
                                        SignPattern signs, std::uint64_t seed) {
    require(std::isfinite(beta) && beta >= 0.0, "build_polynomial_noise: beta must be >= 0");
    require(std::isfinite(tau) && tau > 0.0, "build_polynomial_noise: tau must be > 0");
    require(n >= 1, "build_polynomial_noise: n must be >= 1");

    NoiseRealization noise;
    noise.coefficients.resize(n);
    double root_tau = std::sqrt(tau);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        double mag = root_tau * std::pow(static_cast<double>(k + 1), -beta / 2.0);
        double sign;
        if (signs == SignPattern::alternating) {
            sign = (k % 2 == 0) ? 1.0 : -1.0;
        } else {
            // raw engine bits keep the stream portable across standard libraries
            sign = ((rng() >> 32) & 1u) ? -1.0 : 1.0;
        }
        noise.coefficients[k] = sign * mag;
    }
    noise.p = 0.0;
    noise.delta = delta_of(noise.coefficients);
    noise.eta = noise.delta;
    noise.params = NoiseGenerationParams{beta, tau, signs, seed};
    return noise;
}

NoiseRealization make_noise(std::vector<double> coefficients,
                            const SpectralProblem& problem, double p) {
    require(coefficients.size() == problem.size(),
            "make_noise: coefficient length must match the problem dimension");
    NoiseRealization noise;
    noise.coefficients = std::move(coefficients);
    noise.p = p;
    noise.eta = eta_of(noise.coefficients, problem, p);
    noise.delta = delta_of(noise.coefficients);
    return noise;
}

double eta_of(const std::vector<double>& coefficients, const SpectralProblem& problem, double p) {
    require(coefficients.size() == problem.size(),
            "eta_of: coefficient length must match the problem dimension");
    require(std::isfinite(p) && p >= 0.0 && p <= 0.5, "eta_of: p must lie in [0, 1/2]");
    compensated_sum acc;
    if (p == 0.0) {
        for (double e : coefficients) acc.add(e * e);
    } else {
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
            double w = std::pow(problem.eigenvalues[k], 2.0 * p);
            acc.add(w * coefficients[k] * coefficients[k]);
        }
    }
    return std::sqrt(acc.value());
}

double delta_of(const std::vector<double>& coefficients) {
    compensated_sum acc;
    for (double e : coefficients) acc.add(e * e);
    return std::sqrt(acc.value());
}

NoiseRealization scale_noise_to_eta(const NoiseRealization& noise,
                                    const SpectralProblem& problem,
                                    double p, double eta_target) {
    require(std::isfinite(eta_target) && eta_target > 0.0,
            "scale_noise_to_eta: eta_target must be > 0");
    double current = eta_of(noise.coefficients, problem, p);
    if (current == 0.0)
        throw degenerate_input("scale_noise_to_eta: noise is identically zero");

    NoiseRealization scaled = noise;
    double factor = eta_target / current;
    for (double& e : scaled.coefficients) e *= factor;
    scaled.p = p;
    scaled.eta = eta_of(scaled.coefficients, problem, p);
    scaled.delta = delta_of(scaled.coefficients);
    return scaled;
}

} // namespace heurreg

#pragma once

#include "heurreg/conditions.hpp"
#include "heurreg/experiments.hpp"
#include "heurreg/spectral_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace heurreg {

// Shortest textual form that still recovers the double bit-exactly (17
// significant digits); used for every number the tool writes.
std::string format_double(double v);

// External description of a problem/noise pair: the polynomial family
// parameters plus optional explicit coefficient arrays that take precedence
// over generation.
struct ModelDocument {
    double gamma = 2.0;
    std::size_t n = 100;
    double mu = 1.0;
    double s = 2.0;
    double beta = 0.0;
    double tau = 1.0;
    SignPattern signs = SignPattern::alternating;
    std::uint64_t seed = 0;
    double p = 0.0;
    std::optional<double> eta; // scale the noise to this weak norm
    std::vector<double> eigenvalues;
    std::vector<double> solution;
    std::vector<double> source;
    std::vector<double> noise_coefficients;
};

std::string model_to_json(const ModelDocument& doc);

// Parses a document, rejecting unknown keys with a line-anchored message.
ModelDocument model_from_json_text(const std::string& text);

// Materializes the document: explicit arrays win over generation; `eta`
// rescales the noise after construction.
std::pair<SpectralProblem, NoiseRealization> realize_model(const ModelDocument& doc);

// Inverse of realize_model with explicit arrays, for lossless round trips.
ModelDocument document_of(const SpectralProblem& problem, const NoiseRealization& noise);

// Rate-study configuration as JSON, with unknown-key rejection on input and
// a fully resolved, sorted-key echo on output.
RateStudyConfig rate_config_from_json_text(const std::string& text);
std::string rate_config_to_json(const RateStudyConfig& config);

// Study outputs: the record table as CSV (schema: rule, eta, alpha_star,
// boundary_flag, err_x, err_T, psi_star, alpha_opt), and the full report as
// JSON.  Both carry the version line and the resolved config in their header.
std::string records_csv(const RateStudyReport& report);
std::string report_to_json(const RateStudyReport& report);

std::string condition_to_json(const ConditionReport& report, const std::string& config_json);
std::string condition_ratios_csv(const ConditionReport& report, const std::string& config_json);

// Generic CSV with the standard two-line header block.
std::string csv_document(const std::string& config_json,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows);

std::string to_string(SignPattern signs);
SignPattern sign_pattern_from_string(const std::string& name);

} // namespace heurreg

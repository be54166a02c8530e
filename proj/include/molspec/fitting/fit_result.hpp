#pragma once

#include <functional>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "molspec/fitting/nelder_mead.hpp"

namespace molspec::fitting {

struct FitParameter {
    std::string name;
    double value = 0.0;
    double uncertainty = 0.0;  // 1σ from the local quadratic model; NaN if not determined
    Bounds bounds;
};

struct FitResult {
    std::vector<FitParameter> parameters;
    double residual_norm = 0.0;  // √Σ r²
    std::size_t n_residuals = 0;
    int n_evaluations = 0;
    bool converged = false;
    int failed_evaluations = 0;  // forward-model errors replaced by a penalty during the search

    const FitParameter& parameter(const std::string& name) const;
    double value(const std::string& name) const { return parameter(name).value; }
};

/// {"parameters": {name: {value, uncertainty, lower, upper}}, "residual_norm", "n_evaluations", ...};
/// undetermined uncertainties and infinite bounds serialize as null.
nlohmann::json to_json(const FitResult& result);
FitResult fit_result_from_json(const nlohmann::json& j);

struct ParameterSpec {
    std::string name;
    double initial = 0.0;
    Bounds bounds;
};

using ResidualFunction = std::function<std::vector<double>(std::span<const double>)>;

struct LeastSquaresOptions {
    SimplexOptions simplex;
    /// Damped Gauss–Newton iterations after the simplex stage (0 disables).
    int polish_iterations = 30;
    double relative_fd_step = 1e-6;
};

/// Minimizes Σ r(p)² by simplex descent, then polishes with damped Gauss–Newton on a central-difference
/// Jacobian. Uncertainties are √diag(s² (JᵀJ)⁻¹) with s² = Σ r² / (m − n).
FitResult fit_least_squares(const ResidualFunction& residuals, std::span<const ParameterSpec> params, const LeastSquaresOptions& options = {});

/// Per-parameter summary over independent fits without choosing a weighting for the caller.
struct ParameterAverage {
    std::string name;
    std::size_t count = 0;
    double mean = 0.0;
    double standard_deviation = 0.0;
    double weighted_mean = 0.0;  // inverse-variance; NaN unless every fit reports an uncertainty
    double weighted_uncertainty = 0.0;
};

std::vector<ParameterAverage> average_fits(std::span<const FitResult> fits);
nlohmann::json to_json(std::span<const ParameterAverage> averages);

}  // namespace molspec::fitting

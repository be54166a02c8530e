#pragma once

#include "molspec/fitting/data_io.hpp"

namespace molspec::fitting {

/// Weighted straight line Δν² = a + b·P through a saturation series, with Δν² = (Γ₂/π)²(1 + P/P_sat).
/// Rates are angular: Γ₂ = π√a is reported in µs⁻¹ (gamma2_MHz) and ps⁻¹.
struct Gamma2Extraction {
    double intercept_MHz2 = 0.0;
    double slope_MHz2_per_power = 0.0;
    double zero_power_linewidth_MHz = 0.0;  // √a = Γ₂/π
    double gamma2_MHz = 0.0;
    double gamma2_per_ps = 0.0;
    double p_sat = 0.0;
    double gamma2_uncertainty_MHz = 0.0;
    double p_sat_uncertainty = 0.0;
    double chi2 = 0.0;
};

/// Weights 1/σ² with σ(Δν²) = 2Δν·σ(Δν). Needs ≥ 3 levels; InvalidArgument on a non-positive intercept.
Gamma2Extraction extract_gamma2(const LineScanSeries& series);

/// Exact line through two levels (no uncertainty estimate).
Gamma2Extraction gamma2_from_two_levels(const LineScanPoint& a, const LineScanPoint& b);

}  // namespace molspec::fitting

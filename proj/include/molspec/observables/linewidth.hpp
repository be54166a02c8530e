#pragma once

#include "molspec/model/config.hpp"

namespace molspec::observables {

/// Γ₂(T) = Γ₁/2 + γ(T) in 1/ps.
double gamma2(double temperature_K, const model::ModelConfig& config);

/// Δν = (Γ₂/π)√(1 + S) in MHz for Γ₂ in 1/ps.
double power_broadened_linewidth(double gamma2_per_ps, double saturation);

/// Lorentzian FWHM in MHz for an energy-axis FWHM in meV.
double fwhm_meV_to_MHz(double fwhm_meV);

}  // namespace molspec::observables

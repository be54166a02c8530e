#pragma once

#include <json.hpp>
#include <vector>

#include "molspec/core/grid.hpp"
#include "molspec/model/config.hpp"

namespace molspec::observables {

enum class SpectrumSampling {
    cell_average,  // mean of S over each grid cell; conserves area on any grid
    point,         // S at the grid points
};

struct SpectrumOptions {
    SpectrumSampling sampling = SpectrumSampling::cell_average;
    int threads = 1;
    /// The sideband τ window must satisfy |g₀(τ_max)(𝒢(τ_max) − ⟨B⟩²)| < tail_tolerance·|g₀(0)|.
    double tail_tolerance = 1e-6;
    double max_window_ps = 2000.0;
};

/// Emission spectrum on a detuning grid (meV, relative to the polaron-shifted ZPL).
/// Components are spectral densities per unit angular frequency (1/ps) with g₀(0) = 1 normalization.
struct SpectrumResult {
    UniformGrid detuning_meV;
    std::vector<double> s_zpl_lv;
    std::vector<double> s_sb;
    std::vector<double> s_total;
    double dwf = 1.0;  // ⟨B⟩²
    double polaron_shift_meV = 0.0;
    double sideband_window_ps = 0.0;
    nlohmann::json metadata;

    /// Σ s_zpl_lv / Σ s_total over the grid.
    double zpl_lv_area_fraction() const;
};

/// S_ZPL+LV = ⟨B⟩² Re ∫₀^∞ g₀(τ) e^{−iωτ} dτ and S_SB = Re ∫₀^∞ g₀(τ)(𝒢(τ) − ⟨B⟩²) e^{−iωτ} dτ, where
/// g₀(τ) = Tr[σ_a† e^{Lτ} χ] and χ = ∫₀^∞ σ_a ρ(t) dt from the undriven generator.
/// Vibrational-mode lines and the low-temperature sideband sit at negative detuning.
///
/// The first term is evaluated as the exact resolvent of the reduced generator. The second uses the
/// trapezoid rule on a uniform τ grid; NumericalError if the tail criterion is unmet within max_window_ps.
SpectrumResult emission_spectrum(const model::ModelConfig& config, const UniformGrid& detuning_meV, const SpectrumOptions& options = {});

struct SpectralPeak {
    double detuning_meV;
    double value;
    double prominence;
};

/// Local maxima of `values` whose prominence (height above the higher of the two flanking minima)
/// exceeds `min_relative_prominence` times the global maximum, sorted by detuning.
std::vector<SpectralPeak> find_peaks(const UniformGrid& grid, const std::vector<double>& values, double min_relative_prominence = 1e-3);

}  // namespace molspec::observables

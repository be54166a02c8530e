#pragma once

#include <numbers>

// Internal unit system: energies in meV, times in ps, rates as angular
// frequencies in 1/ps. Conversions happen only at I/O boundaries.
namespace molspec::units {

inline constexpr double kHbar = 0.6582119569;        // meV ps
inline constexpr double kBoltzmann = 0.08617333;     // meV / K
inline constexpr double kSpeedOfLight = 2.99792458e5; // nm / ps
inline constexpr double kPlanckMeVNm = 2.0 * std::numbers::pi * kHbar * kSpeedOfLight; // h c in meV nm

constexpr double energy_to_angular(double energy_meV) { return energy_meV / kHbar; }
constexpr double angular_to_energy(double omega_per_ps) { return omega_per_ps * kHbar; }

constexpr double per_ns_to_per_ps(double rate_per_ns) { return rate_per_ns * 1e-3; }
constexpr double per_ps_to_per_ns(double rate_per_ps) { return rate_per_ps * 1e3; }

constexpr double ns_to_ps(double t_ns) { return t_ns * 1e3; }
constexpr double ps_to_ns(double t_ps) { return t_ps * 1e-3; }

/// Angular frequency (1/ps) to cyclic frequency in MHz.
constexpr double angular_to_MHz(double omega_per_ps) { return omega_per_ps * 1e6 / (2.0 * std::numbers::pi); }
constexpr double MHz_to_angular(double nu_MHz) { return nu_MHz * 2.0 * std::numbers::pi * 1e-6; }

/// Thermal energy k_B T in meV.
constexpr double thermal_energy(double temperature_K) { return kBoltzmann * temperature_K; }

/// Photon-energy detuning from a reference wavelength, h c (1/λ − 1/λ_ref).
constexpr double wavelength_to_detuning(double wavelength_nm, double reference_nm) {
    return kPlanckMeVNm * (1.0 / wavelength_nm - 1.0 / reference_nm);
}
constexpr double detuning_to_wavelength(double detuning_meV, double reference_nm) {
    return 1.0 / (detuning_meV / kPlanckMeVNm + 1.0 / reference_nm);
}

}  // namespace molspec::units

#pragma once

namespace molspec::bath {

/// Damping bath of the local vibrational modes, J_LV(Δ) = scale·Δ³/ζ² e^{−Δ/ζ}; Δ, ζ in 1/ps, scale dimensionless.
struct LocalModeBathParams {
    double scale = 0.0;
    double zeta_per_ps = 1.0;

    void validate() const;
};

/// κ = π·J_LV(Δ) in 1/ps.
double kappa(double delta_per_ps, const LocalModeBathParams& params);

/// ⟨ℬ⟩ = Tr[exp(r(a†−a)) ρ_th], r = η/Δ, on the two-level mode space (equals cos r at any T).
double mode_displacement_expectation(double eta_meV, double delta_meV, double temperature_K);

}  // namespace molspec::bath

#pragma once

#include <vector>

#include "molspec/model/config.hpp"
#include "molspec/quantum/liouvillian.hpp"

namespace molspec::model {

/// Lindblad rates of the assembled generator, all in 1/ps.
struct ModelRates {
    double gamma1 = 0.0;
    double gamma_pd = 0.0;  // enters as 2γ ℒ_{σ†σ}
    std::vector<double> kappa;
    std::vector<double> gamma_plus;   // κ n
    std::vector<double> gamma_minus;  // κ (n + 1)
};

/// Secular drive-dissipator bookkeeping: one entry per Bohr-frequency group.
struct DriveDissipatorTerm {
    double bohr_frequency = 0.0;  // ξ in 1/ps
    double rate_xx = 0.0;         // γ_xx(ξ) before the (Ω/2)² prefactor
    double rate_yy = 0.0;
};

struct AssembledModel {
    quantum::CompositeSpace space;
    quantum::OperatorMatrix hamiltonian;  // 1/ps, rotating frame at the polaron-shifted ZPL
    quantum::OperatorMatrix sigma_a;      // σ ∏ ℬ_i
    quantum::Liouvillian liouvillian;
    ModelRates rates;
    std::vector<double> displacement_ratios;
    std::vector<double> mode_occupations;
    double mean_displacement = 1.0;  // ⟨B⟩ of the bulk bath
    double polaron_shift_meV = 0.0;
    double renormalized_rabi = 0.0;  // meV (ħΩ_r), driven models only
    std::vector<DriveDissipatorTerm> drive_terms;

    /// |e⟩⟨e| ⊗ (thermal or ground) mode state, per the config's initial_mode_state.
    quantum::DensityOperator emission_initial_state(InitialModeState state) const;
};

/// Generator without drive:
/// Γ₁ℒ_{σ_a} + 2γ(T)ℒ_{σ†σ} + Σ_i (−iΔ_i[a_i†a_i, ·] + κ_i n_i ℒ_{a_i†} + κ_i(n_i+1) ℒ_{a_i}).
AssembledModel assemble_undriven(const ModelConfig& config);

/// Adds δ_P σ†σ + (Ω⟨B⟩/2)(σ_a + σ_a†) to H and, when enabled, the secular drive dissipator
/// (Ω/2)² Σ_ξ [γ_xx(ξ) ℒ_{X(ξ)} + γ_yy(ξ) ℒ_{Y(ξ)}] with X = σ_a + σ_a†, Y = i(σ_a − σ_a†).
AssembledModel assemble_driven(const ModelConfig& config);

/// ħΩ_r = ħΩ ⟨B⟩ ∏_i ⟨ℬ_i⟩ in meV, the unit of the drive's omega_meV.
double renormalized_rabi(const ModelConfig& config);

/// ħ(Σ_i η_i²/Δ_i + ∫ J(ω)/ω dω) in meV.
double polaron_shift(const ModelConfig& config);

}  // namespace molspec::model

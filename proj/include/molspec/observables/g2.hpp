#pragma once

#include "molspec/model/config.hpp"
#include "molspec/observables/trace.hpp"

namespace molspec::observables {

/// g²(τ) = Tr[σ_a†σ_a e^{Lτ}(σ_a ρ_ss σ_a†)] / Tr[σ_a†σ_a ρ_ss]² from the driven generator, on a
/// one-sided delay grid in ns starting at 0. Phonon-bath scalar prefactors are taken to cancel in
/// the ratio, which holds for delays beyond the ps-scale phonon memory.
CorrelationTrace g2_resonant(const model::ModelConfig& config, const UniformGrid& tau_ns);

/// 1 − V exp(−(1 + S) Γ₁ |τ|), τ in ns and Γ₁ in 1/ns.
double g2_nonresonant_model(double tau_ns, double visibility, double saturation, double gamma1_per_ns);

}  // namespace molspec::observables

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "molspec/bath/quadrature.hpp"
#include "molspec/core/grid.hpp"

namespace molspec::bath {

using Complex = std::complex<double>;

/// Occupation 1/(e^{δ/k_BT} − 1) of a boson of energy δ (meV) at T (K); 0 at T = 0.
double bose_occupation(double delta_meV, double temperature_K);

/// n(n+1) = 1/(4 sinh²(δ/2k_BT)), evaluated without overflow; 0 at T = 0.
double bose_fluctuation(double delta_meV, double temperature_K);

struct BulkQuadrature {
    double omega_max_per_ps = 0.0;  // 0 selects 12ξ
    int n_points = 1024;            // Gauss nodes on the uniform part of [0, ω_max]
};

/// Super-Ohmic bulk phonon bath J(ω) = α ω³ exp(−ω²/ξ²), ω in 1/ps, α in ps².
struct BulkBathParams {
    double alpha_ps2 = 0.0;
    double xi_per_ps = 1.0;
    BulkQuadrature quadrature;

    double omega_max() const { return quadrature.omega_max_per_ps > 0.0 ? quadrature.omega_max_per_ps : 12.0 * xi_per_ps; }
    /// Throws InvalidArgument unless α ≥ 0, ξ > 0, ω_max ≥ 8ξ and n_points ≥ 16.
    void validate() const;
};

double j_bulk(double omega_per_ps, const BulkBathParams& params);

/// Phase correlation φ(τ) = ∫ J/ω² (coth(ħω/2k_BT) cos ωτ − i sin ωτ) dω of one bath at one temperature.
///
/// Composite 16-point Gauss–Legendre: panels graded from min(ξ, k_BT/ħ)/8 near ω = 0, then uniform panels
/// no wider than min(ω_max·16/n_points, π/τ_max) up to ω_max. Each evaluation is repeated on the
/// refined rule at τ = 0, the middle and the end of the requested range and must agree to 1e−8
/// relative to |φ(0)|, otherwise NumericalError.
class PhononBath {
public:
    PhononBath(const BulkBathParams& params, double temperature_K);

    const BulkBathParams& params() const noexcept { return params_; }
    double temperature() const noexcept { return temperature_K_; }

    /// Re φ(0) = ∫ J/ω² coth dω (Im φ(0) = 0 identically).
    double phi0() const noexcept { return phi0_; }
    double mean_displacement() const { return std::exp(-0.5 * phi0_); }
    double debye_waller() const { return std::exp(-phi0_); }
    /// ∫ J/ω dω in 1/ps (bath part of the polaron shift).
    double reorganization() const noexcept { return reorganization_; }

    Complex phi(double tau_ps) const;
    /// φ on a uniform τ grid (ps); one rule sized for the grid end, phases advanced by recurrence.
    std::vector<Complex> phi(const UniformGrid& tau) const;
    /// 𝒢(τ) = ⟨B⟩² e^{φ(τ)}.
    ComplexSamples correlation_G(const UniformGrid& tau) const;

    /// Smallest τ window (ps) beyond which |𝒢(τ) − ⟨B⟩²| ≤ tol·(1 − ⟨B⟩²), searched geometrically up to `cap`.
    /// Empty if the tail is still above tolerance at `cap`; 0 for a decoupled bath.
    std::optional<double> decay_window(double tol, double cap_ps) const;

private:
    QuadratureRule rule_for(double tau_max, bool refined) const;
    std::vector<Complex> evaluate(const QuadratureRule& rule, const UniformGrid& tau) const;
    double coth_weight(double omega) const;

    BulkBathParams params_;
    double temperature_K_;
    double phi0_ = 0.0;
    double reorganization_ = 0.0;
};

struct PhononCorrelation {
    UniformGrid tau;
    std::vector<Complex> phi_values;
    double mean_displacement = 1.0;
    double temperature_K = 0.0;
};

Complex phi(double tau_ps, double temperature_K, const BulkBathParams& params);
PhononCorrelation phonon_correlation(const UniformGrid& tau, double temperature_K, const BulkBathParams& params);
double mean_displacement(double temperature_K, const BulkBathParams& params);
double debye_waller(double temperature_K, const BulkBathParams& params);
ComplexSamples phonon_correlation_G(const UniformGrid& tau, double temperature_K, const BulkBathParams& params);

/// α giving DWF(T) = target. φ(0) is linear in α, so α = −ln(target)/φ(0)|_{α=1}.
double solve_alpha_for_dwf(double target_dwf, double temperature_K, double xi_per_ps, const BulkQuadrature& quadrature = {});

/// 2·Re ∫₀^∞ C(τ) e^{iξτ} dτ for a correlation sampled on a uniform grid from 0 (composite Simpson, trapezoid on an odd tail).
double one_sided_rate(std::span<const Complex> samples, double step, double xi_per_ps);

}  // namespace molspec::bath

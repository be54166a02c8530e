#pragma once

namespace molspec::bath {

/// Quadratic-coupling pure dephasing γ(T) = μ ∫ ω⁶ n(n+1) A(ω) dω with μ in ps⁶ and ω_c in 1/ps.
struct DephasingParams {
    double mu_ps6 = 0.0;
    double omega_c_per_ps = 1.0;

    void validate() const;
};

/// A(ω) = ∫₀^π sinθ (1+cosθ)⁴ e^{−2ω²(1+cosθ)/ω_c²} dθ = ∫₀² u⁴ e^{−cu} du with c = 2ω²/ω_c².
/// Series in c below c = 1, lower incomplete gamma γ(5, 2c)/c⁵ above. A(0) = 32/5.
double angular_integral(double omega_per_ps, double omega_c_per_ps);

/// γ(T) in 1/ps. Composite Gauss–Legendre over [0, 60 k_BT/ħ] with a grid-doubling check at 1e−8 relative.
double pure_dephasing_rate(double temperature_K, const DephasingParams& params);

/// μ such that γ(T) equals `rate_per_ps`.
double solve_mu_for_rate(double rate_per_ps, double temperature_K, double omega_c_per_ps);

}  // namespace molspec::bath

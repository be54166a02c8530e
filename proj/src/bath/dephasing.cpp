#include "molspec/bath/dephasing.hpp"

#include <cmath>

#include "molspec/bath/phonon_bath.hpp"
#include "molspec/bath/quadrature.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::bath {

namespace {

constexpr double kDoublingTolerance = 1e-8;
constexpr double kUpperInThermalUnits = 60.0;
constexpr int kUniformPanels = 48;

double integrate(const QuadratureRule& rule, double temperature_K, const DephasingParams& p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double w = rule.nodes[k];
        const double w2 = w * w;
        acc += rule.weights[k] * w2 * w2 * w2 * bose_fluctuation(units::angular_to_energy(w), temperature_K) *
               angular_integral(w, p.omega_c_per_ps);
    }
    return acc;
}

}  // namespace

void DephasingParams::validate() const {
    if (!(mu_ps6 >= 0.0) || !std::isfinite(mu_ps6)) throw InvalidArgument("dephasing prefactor mu must be finite and non-negative");
    if (!(omega_c_per_ps > 0.0) || !std::isfinite(omega_c_per_ps)) throw InvalidArgument("dephasing cutoff omega_c must be positive");
}

double angular_integral(double omega_per_ps, double omega_c_per_ps) {
    const double r = omega_per_ps / omega_c_per_ps;
    const double c = 2.0 * r * r;
    if (c < 1.0) {
        // Σ_k (−c)^k/k! · 2^{5+k}/(5+k)
        double term = 1.0, acc = 0.0, pow2 = 32.0;
        for (int k = 0; k < 60; ++k) {
            const double piece = term * pow2 / (5.0 + k);
            acc += piece;
            if (std::abs(piece) < 1e-18 * std::abs(acc)) break;
            term *= -c / (k + 1.0);
            pow2 *= 2.0;
        }
        return acc;
    }
    // 4!/c⁵ · [1 − e^{−2c} Σ_{k≤4} (2c)^k/k!]
    const double x = 2.0 * c;
    const double partial = 1.0 + x + x * x / 2.0 + x * x * x / 6.0 + x * x * x * x / 24.0;
    const double c5 = c * c * c * c * c;
    return 24.0 / c5 * (1.0 - std::exp(-x) * partial);
}

double pure_dephasing_rate(double temperature_K, const DephasingParams& params) {
    params.validate();
    if (!(temperature_K >= 0.0) || !std::isfinite(temperature_K)) throw InvalidArgument("temperature must be finite and non-negative");
    if (temperature_K == 0.0 || params.mu_ps6 == 0.0) return 0.0;
    const double thermal = units::energy_to_angular(units::thermal_energy(temperature_K));
    const double upper = kUpperInThermalUnits * thermal;
    const double fine = std::min(thermal, params.omega_c_per_ps) / 8.0;
    const auto bp = graded_breakpoints(upper, fine, upper / kUniformPanels);
    const double coarse = integrate(composite_gauss_legendre(bp), temperature_K, params);
    const double refined = integrate(composite_gauss_legendre(refine_breakpoints(bp)), temperature_K, params);
    if (std::abs(refined - coarse) > kDoublingTolerance * std::abs(refined))
        throw NumericalError("pure dephasing quadrature did not converge under grid doubling");
    return params.mu_ps6 * coarse;
}

double solve_mu_for_rate(double rate_per_ps, double temperature_K, double omega_c_per_ps) {
    if (!(rate_per_ps >= 0.0)) throw InvalidArgument("target dephasing rate must be non-negative");
    if (!(temperature_K > 0.0)) throw InvalidArgument("dephasing calibration needs T > 0");
    const double unit = pure_dephasing_rate(temperature_K, DephasingParams{1.0, omega_c_per_ps});
    return rate_per_ps / unit;
}

}  // namespace molspec::bath

#include "molspec/bath/local_modes.hpp"

#include <cmath>
#include <numbers>

#include "molspec/bath/phonon_bath.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/quantum/operators.hpp"

namespace molspec::bath {

void LocalModeBathParams::validate() const {
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidArgument("local-mode bath scale must be finite and non-negative");
    if (!(zeta_per_ps > 0.0) || !std::isfinite(zeta_per_ps)) throw InvalidArgument("local-mode bath cutoff zeta must be positive");
}

double kappa(double delta_per_ps, const LocalModeBathParams& params) {
    if (!(delta_per_ps > 0.0)) throw InvalidArgument("mode energy must be positive");
    const double z = params.zeta_per_ps;
    return std::numbers::pi * params.scale * delta_per_ps * delta_per_ps * delta_per_ps / (z * z) * std::exp(-delta_per_ps / z);
}

double mode_displacement_expectation(double eta_meV, double delta_meV, double temperature_K) {
    if (!(delta_meV > 0.0)) throw InvalidArgument("mode energy must be positive");
    const double n = bose_occupation(delta_meV, temperature_K);
    const auto b = quantum::truncated_displacement(eta_meV / delta_meV);
    return (b * quantum::truncated_thermal_state(n)).trace().real();
}

}  // namespace molspec::bath

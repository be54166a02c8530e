#include "molspec/observables/linewidth.hpp"

#include <cmath>
#include <numbers>

#include "molspec/bath/dephasing.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::observables {

double gamma2(double temperature_K, const model::ModelConfig& config) {
    return 0.5 * config.gamma1_per_ps() + bath::pure_dephasing_rate(temperature_K, config.dephasing_params());
}

double power_broadened_linewidth(double gamma2_per_ps, double saturation) {
    if (!(saturation >= 0.0)) throw InvalidArgument("saturation parameter must be non-negative");
    return gamma2_per_ps / std::numbers::pi * 1e6 * std::sqrt(1.0 + saturation);
}

double fwhm_meV_to_MHz(double fwhm_meV) { return units::angular_to_MHz(units::energy_to_angular(fwhm_meV)); }

}  // namespace molspec::observables

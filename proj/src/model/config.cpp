#include "molspec/model/config.hpp"

#include <cmath>

#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::model {

namespace {

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void ModelConfig::validate() const {
    require(finite(gamma1_per_ns) && gamma1_per_ns > 0.0, "gamma1_per_ns", "must be positive");
    require(finite(zpl_wavelength_nm) && zpl_wavelength_nm > 0.0, "zpl_wavelength_nm", "must be positive");
    require(finite(temperature_K) && temperature_K >= 0.0, "temperature_K", "must be non-negative");
    require(modes.size() <= kMaxModes, "modes", "at most " + std::to_string(kMaxModes) + " modes are supported");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string at = "modes[" + std::to_string(i) + "]";
        require(finite(modes[i].delta_meV) && modes[i].delta_meV > 0.0, at + ".delta_meV", "must be positive");
        require(finite(modes[i].eta_meV), at + ".eta_meV", "must be finite");
        for (std::size_t j = 0; j < i; ++j)
            require(std::abs(modes[i].delta_meV - modes[j].delta_meV) > 1e-6, at + ".delta_meV",
                    "duplicates modes[" + std::to_string(j) + "]");
    }
    require(finite(bulk_bath.alpha_ps2) && bulk_bath.alpha_ps2 >= 0.0, "bulk_bath.alpha_ps2", "must be non-negative");
    require(finite(bulk_bath.xi_meV) && bulk_bath.xi_meV > 0.0, "bulk_bath.xi_meV", "must be positive");
    require(bulk_bath.omega_max_meV == 0.0 || bulk_bath.omega_max_meV >= 8.0 * bulk_bath.xi_meV,
            "bulk_bath.quadrature.omega_max_meV", "must be at least 8 xi_meV");
    require(bulk_bath.n_points >= bath::kGaussOrder, "bulk_bath.quadrature.n_points", "must be at least 16");
    require(finite(lv_bath.scale) && lv_bath.scale >= 0.0, "lv_bath.scale", "must be non-negative");
    require(finite(lv_bath.zeta_meV) && lv_bath.zeta_meV > 0.0, "lv_bath.zeta_meV", "must be positive");
    require(finite(dephasing.mu_ps6) && dephasing.mu_ps6 >= 0.0, "dephasing.mu_ps6", "must be non-negative");
    require(finite(dephasing.omega_c_meV) && dephasing.omega_c_meV > 0.0, "dephasing.omega_c_meV", "must be positive");
    if (drive) {
        require(finite(drive->omega_meV) && drive->omega_meV >= 0.0, "drive.omega_meV", "must be non-negative");
        require(finite(drive->detuning_meV), "drive.detuning_from_polaron_zpl_meV", "must be finite");
    }
    if (jitter_fwhm_ps) require(finite(*jitter_fwhm_ps) && *jitter_fwhm_ps >= 0.0, "jitter_fwhm_ps", "must be non-negative");
    if (instrument_fwhm_meV)
        require(finite(*instrument_fwhm_meV) && *instrument_fwhm_meV >= 0.0, "instrument_fwhm_meV", "must be non-negative");
}

double ModelConfig::gamma1_per_ps() const { return units::per_ns_to_per_ps(gamma1_per_ns); }

bath::BulkBathParams ModelConfig::bulk_params() const {
    return {bulk_bath.alpha_ps2, units::energy_to_angular(bulk_bath.xi_meV),
            {units::energy_to_angular(bulk_bath.omega_max_meV), bulk_bath.n_points}};
}

bath::LocalModeBathParams ModelConfig::lv_params() const { return {lv_bath.scale, units::energy_to_angular(lv_bath.zeta_meV)}; }

bath::DephasingParams ModelConfig::dephasing_params() const {
    return {dephasing.mu_ps6, units::energy_to_angular(dephasing.omega_c_meV)};
}

}  // namespace molspec::model

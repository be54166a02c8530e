#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>

#include "molspec/model/config.hpp"

namespace molspec::model {

/// JSON configuration. Keys carry unit suffixes; unknown keys are rejected.
///
///   gamma1_per_ns, temperature_K, modes[{delta_meV, eta_meV}], zpl_wavelength_nm (optional),
///   bulk_bath{alpha_ps2 | dwf_target [, dwf_temperature_K], xi_meV, quadrature{omega_max_meV, n_points}},
///   lv_bath{scale, zeta_meV},
///   dephasing{mu_ps6 | rate_target_per_ns, rate_temperature_K, omega_c_meV},
///   drive{omega_meV, detuning_from_polaron_zpl_meV, include_drive_dissipator} (optional),
///   jitter_fwhm_ps, instrument_fwhm_meV, initial_mode_state ("thermal" | "ground") (optional).
///
/// Calibration targets (dwf_target, rate_target_per_ns) are solved at load time; the resulting
/// ModelConfig only holds alpha_ps2 and mu_ps6.
ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::filesystem::path& path);
ModelConfig config_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ModelConfig& config);

}  // namespace molspec::model

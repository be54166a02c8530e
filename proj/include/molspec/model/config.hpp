#pragma once

#include <optional>
#include <string>
#include <vector>

#include "molspec/bath/dephasing.hpp"
#include "molspec/bath/local_modes.hpp"
#include "molspec/bath/phonon_bath.hpp"

namespace molspec::model {

/// Local vibrational mode: energy Δ and linear coupling η, both in meV.
struct ModeSpec {
    double delta_meV = 0.0;
    double eta_meV = 0.0;

    double displacement_ratio() const { return eta_meV / delta_meV; }
};

struct BulkBathSpec {
    double alpha_ps2 = 0.0;
    double xi_meV = 1.0;
    double omega_max_meV = 0.0;  // 0 selects 12ξ
    int n_points = 1024;
};

struct LocalBathSpec {
    double scale = 0.0;
    double zeta_meV = 10.0;
};

struct DephasingSpec {
    double mu_ps6 = 0.0;
    double omega_c_meV = 1.0;
};

/// Coherent drive: Rabi energy ħΩ and laser detuning from the polaron-shifted line, both meV.
struct DriveSpec {
    double omega_meV = 0.0;
    double detuning_meV = 0.0;  // δ_P = E_P − ħω_L, enters H as δ_P σ†σ
    bool include_drive_dissipator = true;
};

enum class InitialModeState { thermal, ground };

/// Full physical parameter set, stored in I/O units; conversion to internal units happens in the
/// accessor helpers below.
struct ModelConfig {
    static constexpr std::size_t kMaxModes = 6;

    double gamma1_per_ns = 0.231;
    double zpl_wavelength_nm = 782.32;
    double temperature_K = 4.7;
    std::vector<ModeSpec> modes;
    BulkBathSpec bulk_bath;
    LocalBathSpec lv_bath;
    DephasingSpec dephasing;
    std::optional<DriveSpec> drive;
    std::optional<double> jitter_fwhm_ps;
    std::optional<double> instrument_fwhm_meV;
    InitialModeState initial_mode_state = InitialModeState::thermal;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    double gamma1_per_ps() const;
    bath::BulkBathParams bulk_params() const;
    bath::LocalModeBathParams lv_params() const;
    bath::DephasingParams dephasing_params() const;
};

}  // namespace molspec::model

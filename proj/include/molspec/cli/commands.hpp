#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "molspec/model/config.hpp"

namespace molspec::cli {

enum ExitCode : int { success = 0, internal_error = 1, input_error = 2, numerical_failure = 3 };

/// Provenance written next to every output: manifest.json in the directory and a `# manifest {...}`
/// line at the top of each CSV. The timestamp comes from --timestamp or SOURCE_DATE_EPOCH and is
/// null otherwise, so repeated invocations stay byte-identical.
struct RunManifest {
    std::string command;
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 1;
    std::string tool_version;
    std::optional<std::string> timestamp;
    std::vector<std::string> arguments;
    nlohmann::json config;  // resolved model configuration, null when none was loaded

    nlohmann::json to_json() const;
};

struct CommonOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    int threads = 0;  // 0 selects hardware concurrency
    std::uint64_t seed = 1;
    std::optional<std::string> timestamp;
};

struct SpectrumOptions {
    double grid_min_meV = -60.0;
    double grid_max_meV = 20.0;
    double grid_step_meV = 0.02;
    double max_window_ps = 2000.0;  // sideband delay window cap
};

struct G2Options {
    double tau_max_ns = 20.0;
    double tau_step_ps = 10.0;
    std::optional<double> jitter_fwhm_ps;
};

struct FitOptions {
    std::filesystem::path data_path;
    std::vector<std::string> free_params;  // spectrum: defaults to every delta_i, eta_i
    std::string axis = "header";           // spectrum: header | wavelength | detuning
    std::string g2_model = "resonant";     // g2: resonant | nonresonant
    bool fit_jitter = false;
    int max_evaluations = 0;  // 0 keeps the fitter default
};

/// Parses `--temps` lists such as "4.7,10,20"; InvalidArgument on malformed entries.
std::vector<double> parse_temperature_list(const std::string& text);

const char* tool_version();

void cmd_spectrum(const CommonOptions& common, const SpectrumOptions& options, RunManifest manifest);
void cmd_g2(const CommonOptions& common, const G2Options& options, RunManifest manifest);
void cmd_linewidth_sweep(const CommonOptions& common, const std::vector<double>& temperatures_K, RunManifest manifest);
void cmd_dwf(const CommonOptions& common, const std::vector<double>& temperatures_K, RunManifest manifest);
void cmd_fit_spectrum(const CommonOptions& common, const FitOptions& options, RunManifest manifest);
void cmd_fit_linescan(const CommonOptions& common, const FitOptions& options, RunManifest manifest);
void cmd_fit_g2(const CommonOptions& common, const FitOptions& options, RunManifest manifest);

/// Full command-line entry point; maps input errors to 2 and numerical failures to 3.
int run(int argc, const char* const* argv);

}  // namespace molspec::cli

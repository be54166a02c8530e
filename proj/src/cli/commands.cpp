#include "molspec/cli/commands.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include "molspec/bath/phonon_bath.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"
#include "molspec/fitting/data_io.hpp"
#include "molspec/fitting/g2_fit.hpp"
#include "molspec/fitting/linescan.hpp"
#include "molspec/fitting/spectrum_fit.hpp"
#include "molspec/model/assemble.hpp"
#include "molspec/model/config_io.hpp"
#include "molspec/observables/convolution.hpp"
#include "molspec/observables/g2.hpp"
#include "molspec/observables/linewidth.hpp"
#include "molspec/observables/spectrum.hpp"

#ifndef MOLSPEC_VERSION
#define MOLSPEC_VERSION "0.0.0"
#endif

namespace molspec::cli {

namespace {

using fitting::write_csv;
using nlohmann::json;

// Peaks below this fraction of the tallest sideband/vibronic feature are left out of the summary.
constexpr double kPeakProminence = 1e-3;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

std::optional<std::string> resolve_timestamp(const std::optional<std::string>& flag) {
    if (flag) return flag;
    const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
    if (!epoch || !*epoch) return std::nullopt;
    long long seconds = 0;
    const std::string_view s(epoch);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seconds);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("SOURCE_DATE_EPOCH is not an integer");
    const std::time_t t = static_cast<std::time_t>(seconds);
    std::tm utc{};
    gmtime_r(&t, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return std::string(buf);
}

class OutputDir {
public:
    OutputDir(const std::filesystem::path& dir, RunManifest manifest) : dir_(dir), manifest_(std::move(manifest)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw InvalidArgument("cannot create output directory " + dir_.string() + ": " + ec.message());
        write_json("manifest.json", manifest_.to_json());
    }

    void write_json(const std::string& name, const json& j) const {
        auto out = open(name);
        out << j.dump(2) << '\n';
    }

    void write_table(const std::string& name, std::span<const std::string> header, std::span<const std::vector<double>> columns) const {
        auto out = open(name);
        const std::vector<std::string> comments{"manifest " + manifest_.to_json().dump()};
        write_csv(out, comments, header, columns);
    }

    const RunManifest& manifest() const { return manifest_; }

private:
    std::ofstream open(const std::string& name) const {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write " + (dir_ / name).string());
        return out;
    }

    std::filesystem::path dir_;
    RunManifest manifest_;
};

model::ModelConfig load(const CommonOptions& common, RunManifest& manifest) {
    auto config = model::load_config(common.config_path);
    manifest.config = model::config_to_json(config);
    return config;
}

UniformGrid spectrum_grid(const SpectrumOptions& o) {
    if (!(o.grid_step_meV > 0.0) || !(o.grid_max_meV > o.grid_min_meV))
        throw InvalidArgument("spectrum grid needs --grid-step > 0 and --grid-max > --grid-min");
    return UniformGrid::spanning(o.grid_min_meV, o.grid_max_meV, o.grid_step_meV);
}

json peak_table(const UniformGrid& grid, const std::vector<double>& values) {
    json peaks = json::array();
    for (const auto& p : observables::find_peaks(grid, values, kPeakProminence))
        peaks.push_back({{"detuning_meV", p.detuning_meV}, {"value", p.value}, {"prominence", p.prominence}});
    return peaks;
}

std::vector<double> sweep(const std::vector<double>& temperatures_K, const std::function<double(double)>& f) {
    std::vector<double> out;
    for (double t : temperatures_K) out.push_back(f(t));
    return out;
}

void require_temperatures(const std::vector<double>& temperatures_K) {
    if (temperatures_K.empty()) throw InvalidArgument("--temps: temperature list is empty");
}

json fit_document(const fitting::FitResult& result, const std::string& kind, const RunManifest& manifest) {
    json j = fitting::to_json(result);
    j["kind"] = kind;
    j["manifest"] = manifest.to_json();
    return j;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
    return {{"command", command},
            {"config_path", config_path},
            {"output_dir", output_dir},
            {"seed", seed},
            {"tool_version", tool_version},
            {"timestamp", timestamp ? json(*timestamp) : json(nullptr)},
            {"arguments", arguments},
            {"config", config}};
}

const char* tool_version() { return MOLSPEC_VERSION; }

std::vector<double> parse_temperature_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        std::string_view item(text.data() + start, (comma == std::string::npos ? text.size() : comma) - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) {
            if (comma == std::string::npos && out.empty() && text.find_first_not_of(' ') == std::string::npos) break;
            throw InvalidArgument("--temps: empty entry in '" + text + "'");
        }
        double t = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), t);
        if (ec != std::errc() || ptr != item.data() + item.size() || !(t >= 0.0) || !std::isfinite(t))
            throw InvalidArgument("--temps: '" + std::string(item) + "' is not a non-negative temperature in K");
        out.push_back(t);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void cmd_spectrum(const CommonOptions& common, const SpectrumOptions& options, RunManifest manifest) {
    const auto config = load(common, manifest);
    const auto grid = spectrum_grid(options);
    observables::SpectrumOptions so;
    so.threads = resolve_threads(common.threads);
    so.max_window_ps = options.max_window_ps;
    const auto r = observables::emission_spectrum(config, grid, so);
    const OutputDir out(common.out_dir, std::move(manifest));

    const std::vector<std::string> header{"detuning_meV", "s_zpl_lv", "s_sb", "s_total"};
    const std::vector<std::vector<double>> cols{grid.points(), r.s_zpl_lv, r.s_sb, r.s_total};
    out.write_table("spectrum.csv", header, cols);

    const double g2 = observables::gamma2(config.temperature_K, config);
    out.write_json("summary.json", {{"temperature_K", config.temperature_K},
                                    {"dwf", r.dwf},
                                    {"zpl_lv_area_fraction", r.zpl_lv_area_fraction()},
                                    {"polaron_shift_meV", r.polaron_shift_meV},
                                    {"sideband_window_ps", r.sideband_window_ps},
                                    {"gamma2_per_ps", g2},
                                    {"zpl_linewidth_MHz", observables::power_broadened_linewidth(g2, 0.0)},
                                    {"peaks", peak_table(grid, r.s_total)},
                                    {"manifest", out.manifest().to_json()}});
}

void cmd_g2(const CommonOptions& common, const G2Options& options, RunManifest manifest) {
    auto config = load(common, manifest);
    if (!(options.tau_step_ps > 0.0) || !(options.tau_max_ns > 0.0)) throw InvalidArgument("g2 needs --tau-max > 0 and --tau-step > 0");
    if (options.jitter_fwhm_ps) {
        if (*options.jitter_fwhm_ps < 0.0) throw InvalidArgument("--jitter-fwhm-ps must be non-negative");
        config.jitter_fwhm_ps = *options.jitter_fwhm_ps;
        manifest.config = model::config_to_json(config);
    }
    const auto tau = UniformGrid::spanning(0.0, options.tau_max_ns, units::ps_to_ns(options.tau_step_ps));
    const auto trace = observables::g2_resonant(config, tau);
    const double jitter = config.jitter_fwhm_ps.value_or(0.0);
    const auto convolved = jitter > 0.0 ? observables::convolve_jitter(trace, jitter, observables::Padding::reflect) : trace;

    const OutputDir out(common.out_dir, std::move(manifest));
    const std::vector<std::string> header{"tau_ns", "g2", "g2_convolved"};
    const std::vector<std::vector<double>> cols{tau.points(), trace.values, convolved.values};
    out.write_table("g2.csv", header, cols);
}

void cmd_linewidth_sweep(const CommonOptions& common, const std::vector<double>& temperatures_K, RunManifest manifest) {
    require_temperatures(temperatures_K);
    const auto config = load(common, manifest);
    const auto g2 = sweep(temperatures_K, [&](double t) { return observables::gamma2(t, config); });
    std::vector<double> pure, mhz, per_ns;
    for (double g : g2) {
        pure.push_back(g - 0.5 * config.gamma1_per_ps());
        mhz.push_back(observables::power_broadened_linewidth(g, 0.0));
        per_ns.push_back(units::per_ps_to_per_ns(g));
    }
    const auto dwf = sweep(temperatures_K, [&](double t) { return bath::PhononBath(config.bulk_params(), t).debye_waller(); });

    const OutputDir out(common.out_dir, std::move(manifest));
    const std::vector<std::string> gh{"temperature_K", "gamma2_per_ns", "pure_dephasing_per_ps", "zpl_linewidth_MHz"};
    const std::vector<std::vector<double>> gc{temperatures_K, per_ns, pure, mhz};
    out.write_table("gamma2_vs_T.csv", gh, gc);
    const std::vector<std::string> dh{"temperature_K", "dwf"};
    const std::vector<std::vector<double>> dc{temperatures_K, dwf};
    out.write_table("dwf_vs_T.csv", dh, dc);
}

void cmd_dwf(const CommonOptions& common, const std::vector<double>& temperatures_K, RunManifest manifest) {
    const auto config = load(common, manifest);
    const bath::PhononBath bath(config.bulk_params(), config.temperature_K);
    std::vector<double> mode_factors;
    for (double r : model::assemble_undriven(config).displacement_ratios) mode_factors.push_back(std::cos(r));
    const OutputDir out(common.out_dir, std::move(manifest));
    out.write_json("dwf.json", {{"temperature_K", config.temperature_K},
                                {"dwf", bath.debye_waller()},
                                {"mean_displacement", bath.mean_displacement()},
                                {"alpha_ps2", config.bulk_bath.alpha_ps2},
                                {"polaron_shift_meV", model::polaron_shift(config)},
                                {"mode_rabi_factors", mode_factors},
                                {"manifest", out.manifest().to_json()}});
    if (!temperatures_K.empty()) {
        const auto dwf = sweep(temperatures_K, [&](double t) { return bath::PhononBath(config.bulk_params(), t).debye_waller(); });
        const std::vector<std::string> dh{"temperature_K", "dwf"};
        const std::vector<std::vector<double>> dc{temperatures_K, dwf};
        out.write_table("dwf_vs_T.csv", dh, dc);
    }
}

void cmd_fit_spectrum(const CommonOptions& common, const FitOptions& options, RunManifest manifest) {
    const auto config = load(common, manifest);
    fitting::SpectrumAxis axis = fitting::SpectrumAxis::from_header;
    if (options.axis == "wavelength") axis = fitting::SpectrumAxis::wavelength_nm;
    else if (options.axis == "detuning") axis = fitting::SpectrumAxis::detuning_meV;
    else if (options.axis != "header") throw InvalidArgument("--axis must be header, wavelength or detuning");
    auto data = fitting::load_spectrum_csv(options.data_path, axis, config.zpl_wavelength_nm);
    data.normalize_to_peak();

    std::vector<std::string> names = options.free_params;
    if (names.empty())
        for (std::size_t i = 1; i <= config.modes.size(); ++i) {
            names.push_back("delta_" + std::to_string(i));
            names.push_back("eta_" + std::to_string(i));
        }
    fitting::SpectrumFitOptions fo;
    fo.seed = common.seed;
    fo.threads = resolve_threads(common.threads);
    if (options.max_evaluations > 0) fo.max_evaluations = options.max_evaluations;
    const auto fit = fitting::fit_spectrum(data, config, names, {}, fo);

    const OutputDir out(common.out_dir, std::move(manifest));
    auto doc = fit_document(fit.result, "spectrum", out.manifest());
    doc["fitted_config"] = model::config_to_json(fit.config);
    doc["amplitude"] = fit.amplitude;
    doc["offset"] = fit.offset;
    out.write_json("fit.json", doc);
    const std::vector<std::string> header{"detuning_meV", "data", "model"};
    const std::vector<std::vector<double>> cols{data.detuning_meV, data.intensity, fit.model_intensity};
    out.write_table("overlay.csv", header, cols);
}

void cmd_fit_linescan(const CommonOptions& common, const FitOptions& options, RunManifest manifest) {
    const auto series = fitting::load_linescan_csv(options.data_path);
    const auto g = fitting::extract_gamma2(series);
    fitting::FitResult result;
    result.parameters = {{"gamma2_MHz", g.gamma2_MHz, g.gamma2_uncertainty_MHz, {0.0, std::numeric_limits<double>::infinity()}},
                         {"p_sat", g.p_sat, g.p_sat_uncertainty, {}}};
    result.residual_norm = std::sqrt(g.chi2);
    result.n_residuals = series.points.size();
    result.n_evaluations = 1;
    result.converged = true;

    const OutputDir out(common.out_dir, std::move(manifest));
    auto doc = fit_document(result, "linescan", out.manifest());
    doc["gamma2_MHz"] = g.gamma2_MHz;
    doc["gamma2_per_ps"] = g.gamma2_per_ps;
    doc["gamma2_uncertainty_MHz"] = g.gamma2_uncertainty_MHz;
    doc["zero_power_linewidth_MHz"] = g.zero_power_linewidth_MHz;
    doc["p_sat"] = g.p_sat;
    doc["intercept_MHz2"] = g.intercept_MHz2;
    doc["slope_MHz2_per_power"] = g.slope_MHz2_per_power;
    doc["chi2"] = g.chi2;
    out.write_json("fit.json", doc);

    std::vector<double> power, width, sigma, model;
    for (const auto& p : series.points) {
        power.push_back(p.power);
        width.push_back(p.linewidth_MHz);
        sigma.push_back(p.uncertainty_MHz);
        model.push_back(std::sqrt(g.intercept_MHz2 + g.slope_MHz2_per_power * p.power));
    }
    const std::vector<std::string> header{"power", "linewidth_MHz", "uncertainty_MHz", "model_linewidth_MHz"};
    const std::vector<std::vector<double>> cols{power, width, sigma, model};
    out.write_table("overlay.csv", header, cols);
}

void cmd_fit_g2(const CommonOptions& common, const FitOptions& options, RunManifest manifest) {
    const auto config = load(common, manifest);
    const auto trace = fitting::load_trace_csv(options.data_path);
    fitting::G2FitOptions go;
    go.seed = common.seed;
    go.fit_jitter = options.fit_jitter;
    if (options.max_evaluations > 0) go.max_evaluations = options.max_evaluations;
    fitting::G2Fit fit;
    if (options.g2_model == "resonant") {
        fit = fitting::fit_g2_resonant(trace, config, go);
    } else if (options.g2_model == "nonresonant") {
        fit = fitting::fit_g2_nonresonant(trace, config.gamma1_per_ns, 0.9, 0.5, go);
    } else {
        throw InvalidArgument("--model must be resonant or nonresonant");
    }
    const OutputDir out(common.out_dir, std::move(manifest));
    auto doc = fit_document(fit.result, "g2_" + options.g2_model, out.manifest());
    out.write_json("fit.json", doc);
    const std::vector<std::string> header{"tau_ns", "data", "model"};
    const std::vector<std::vector<double>> cols{trace.tau_ns.points(), trace.values, fit.model};
    out.write_table("overlay.csv", header, cols);
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Spectra, linewidths and photon correlations of a single molecule coupled to vibrations and phonons", "molspec"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    CommonOptions common;
    std::string timestamp;
    SpectrumOptions grid;
    G2Options g2;
    FitOptions fit;
    std::string temps;
    double jitter = 0.0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", common.config_path, "Model configuration (JSON)");
        if (config_required) c->required();
        sub->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", common.seed, "Seed for randomized fit restarts")->capture_default_str();
        sub->add_option("--timestamp", timestamp, "Timestamp recorded in the manifest (default: SOURCE_DATE_EPOCH)");
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid-min", grid.grid_min_meV, "Lowest detuning (meV)")->capture_default_str();
        sub->add_option("--grid-max", grid.grid_max_meV, "Highest detuning (meV)")->capture_default_str();
        sub->add_option("--grid-step", grid.grid_step_meV, "Detuning step (meV)")->capture_default_str();
    };

    auto* spectrum = app.add_subcommand("spectrum", "Emission spectrum: spectrum.csv and summary.json");
    add_common(spectrum, true);
    add_grid(spectrum);
    spectrum->add_option("--max-window-ps", grid.max_window_ps, "Longest sideband delay window (ps)")->capture_default_str();

    auto* g2cmd = app.add_subcommand("g2", "Resonantly driven g2(tau): g2.csv");
    add_common(g2cmd, true);
    g2cmd->add_option("--tau-max", g2.tau_max_ns, "Largest delay (ns)")->capture_default_str();
    g2cmd->add_option("--tau-step", g2.tau_step_ps, "Delay step (ps)")->capture_default_str();
    g2cmd->add_option("--jitter-fwhm-ps", jitter, "Detector jitter FWHM (ps), overrides the config");

    auto* sweep_cmd = app.add_subcommand("linewidth-sweep", "Dephasing rate and DWF against temperature");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--temps", temps, "Comma-separated temperatures (K)")->required();

    auto* dwf = app.add_subcommand("dwf", "Debye-Waller factor of the configured bath");
    add_common(dwf, true);
    dwf->add_option("--temps", temps, "Optional comma-separated temperatures (K) for dwf_vs_T.csv");

    auto* fit_cmd = app.add_subcommand("fit", "Fit model parameters to measured data");
    fit_cmd->require_subcommand(1);
    auto add_data = [&](CLI::App* sub) { sub->add_option("--data", fit.data_path, "Measured data (CSV)")->required(); };
    auto* fit_spectrum = fit_cmd->add_subcommand("spectrum", "Fit mode and bath parameters to an emission spectrum");
    add_common(fit_spectrum, true);
    add_data(fit_spectrum);
    fit_spectrum->add_option("--params", fit.free_params, "Free parameters (default: every delta_i, eta_i)")->delimiter(',');
    fit_spectrum->add_option("--axis", fit.axis, "Data axis: header | wavelength | detuning")->capture_default_str();
    fit_spectrum->add_option("--max-evals", fit.max_evaluations, "Simplex evaluation budget");
    auto* fit_linescan = fit_cmd->add_subcommand("linescan", "Zero-power dephasing rate from a saturation series");
    add_common(fit_linescan, false);
    add_data(fit_linescan);
    auto* fit_g2 = fit_cmd->add_subcommand("g2", "Fit a g2 trace (resonant: drive amplitude; nonresonant: V and S)");
    add_common(fit_g2, true);
    add_data(fit_g2);
    fit_g2->add_option("--model", fit.g2_model, "resonant | nonresonant")->capture_default_str();
    fit_g2->add_flag("--fit-jitter", fit.fit_jitter, "Also fit the detector jitter FWHM (resonant)");
    fit_g2->add_option("--max-evals", fit.max_evaluations, "Simplex evaluation budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? success : input_error;
    }

    try {
        if (!timestamp.empty()) common.timestamp = timestamp;
        RunManifest manifest;
        manifest.config_path = common.config_path.string();
        manifest.output_dir = common.out_dir.string();
        manifest.seed = common.seed;
        manifest.tool_version = tool_version();
        manifest.timestamp = resolve_timestamp(common.timestamp);
        for (int i = 1; i < argc; ++i) manifest.arguments.emplace_back(argv[i]);

        if (spectrum->parsed()) {
            manifest.command = "spectrum";
            cmd_spectrum(common, grid, manifest);
        } else if (g2cmd->parsed()) {
            manifest.command = "g2";
            if (g2cmd->count("--jitter-fwhm-ps")) g2.jitter_fwhm_ps = jitter;
            cmd_g2(common, g2, manifest);
        } else if (sweep_cmd->parsed()) {
            manifest.command = "linewidth-sweep";
            cmd_linewidth_sweep(common, parse_temperature_list(temps), manifest);
        } else if (dwf->parsed()) {
            manifest.command = "dwf";
            cmd_dwf(common, parse_temperature_list(temps), manifest);
        } else if (fit_spectrum->parsed()) {
            manifest.command = "fit spectrum";
            cmd_fit_spectrum(common, fit, manifest);
        } else if (fit_linescan->parsed()) {
            manifest.command = "fit linescan";
            cmd_fit_linescan(common, fit, manifest);
        } else if (fit_g2->parsed()) {
            manifest.command = "fit g2";
            cmd_fit_g2(common, fit, manifest);
        }
    } catch (const DataError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const InvalidArgument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return internal_error;
    }
    return success;
}

}  // namespace molspec::cli

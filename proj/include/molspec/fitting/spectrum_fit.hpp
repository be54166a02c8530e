#pragma once

#include <map>
#include <string>
#include <vector>

#include "molspec/fitting/data_io.hpp"
#include "molspec/fitting/fit_result.hpp"
#include "molspec/model/config.hpp"

namespace molspec::fitting {

struct SpectrumFitOptions {
    double log_floor = 1e-4;  // residual floor relative to the data peak
    int max_evaluations = 3000;
    int max_restarts = 2;
    std::uint64_t seed = 1;
    int threads = 1;
    int polish_iterations = 10;
};

struct SpectrumFit {
    FitResult result;
    model::ModelConfig config;  // initial config with fitted values, modes sorted by Δ
    double amplitude = 1.0;
    double offset = 0.0;
    std::vector<double> model_intensity;  // on the data axis
};

/// Fit parameters by name: delta_<i>, eta_<i> (1-based, meV), alpha (ps²), xi (meV), lv_scale, zeta (meV),
/// mu (ps⁶), amplitude, offset. The forward model is amplitude·peak·S_total(δ)/S_ref + offset·peak with
/// S_ref the maximum of the initial-config spectrum, so amplitude starts at 1 and offset at 0.
///
/// Residuals are ln max(model, ε) − ln max(data, ε) with ε = log_floor·peak. Modes are sorted by Δ
/// before each evaluation and in the result, so the fit is invariant under mode relabelling.
SpectrumFit fit_spectrum(const SpectrumData& data, const model::ModelConfig& initial, const std::vector<std::string>& free_params,
                         const std::map<std::string, Bounds>& bounds = {}, const SpectrumFitOptions& options = {});

/// Forward model of fit_spectrum on the data axis (peak = 1, S_ref from `config` itself).
std::vector<double> spectrum_on_axis(const model::ModelConfig& config, const std::vector<double>& detuning_meV, int threads = 1);

}  // namespace molspec::fitting

#pragma once

#include <optional>

#include "molspec/fitting/fit_result.hpp"
#include "molspec/model/config.hpp"
#include "molspec/observables/trace.hpp"

namespace molspec::fitting {

struct G2FitOptions {
    bool fit_jitter = false;  // resonant only; initial value from config.jitter_fwhm_ps or 50 ps
    int max_evaluations = 400;
    int max_restarts = 1;
    std::uint64_t seed = 1;
    int polish_iterations = 10;
};

struct G2Fit {
    FitResult result;
    std::vector<double> model;  // on the trace delays
};

/// Full resonant model: g2_resonant at drive amplitude `omega` (meV), optionally convolved with a
/// Gaussian jitter of FWHM `jitter_ps`. The trace must be one-sided from τ = 0; the drive section of
/// `config` supplies the initial amplitude. Residuals are linear in g².
G2Fit fit_g2_resonant(const observables::CorrelationTrace& trace, const model::ModelConfig& config, const G2FitOptions& options = {});

/// Closed form 1 − V exp(−(1 + S)Γ₁|τ|) with parameters `visibility` ∈ [0, 1] and `saturation` ≥ 0.
G2Fit fit_g2_nonresonant(const observables::CorrelationTrace& trace, double gamma1_per_ns, double visibility0 = 0.9,
                         double saturation0 = 0.5, const G2FitOptions& options = {});

}  // namespace molspec::fitting

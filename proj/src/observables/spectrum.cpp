#include "molspec/observables/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "molspec/bath/phonon_bath.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/parallel.hpp"
#include "molspec/core/units.hpp"
#include "molspec/model/assemble.hpp"
#include "molspec/model/config_io.hpp"
#include "molspec/observables/convolution.hpp"
#include "molspec/quantum/correlator_transform.hpp"
#include "molspec/quantum/dynamics.hpp"

namespace molspec::observables {

using quantum::Complex;

namespace {

constexpr double kMaxSidebandStep = 0.005;  // ps
constexpr std::size_t kReseedInterval = 256;

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// Re Σ_k w_k f_k e^{−iω τ_k} for every ω on the grid; w_k carries the trapezoid weights and,
// for cell averages, the sinc factor of the cell.
std::vector<double> half_fourier(const std::vector<Complex>& weighted, double tau_step, const UniformGrid& omega, int threads) {
    std::vector<double> out(omega.size, 0.0);
    parallel_for(omega.size, threads, [&](std::size_t j) {
        const double w = omega[j];
        const Complex rot = std::polar(1.0, -w * tau_step);
        Complex phase(1.0, 0.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < weighted.size(); ++k) {
            if (k % kReseedInterval == 0) phase = std::polar(1.0, -w * tau_step * static_cast<double>(k));
            acc += (weighted[k] * phase).real();
            phase *= rot;
        }
        out[j] = acc;
    });
    return out;
}

}  // namespace

double SpectrumResult::zpl_lv_area_fraction() const {
    const double total = std::accumulate(s_total.begin(), s_total.end(), 0.0);
    return std::accumulate(s_zpl_lv.begin(), s_zpl_lv.end(), 0.0) / total;
}

SpectrumResult emission_spectrum(const model::ModelConfig& config, const UniformGrid& detuning_meV, const SpectrumOptions& options) {
    if (detuning_meV.size == 0 || !(detuning_meV.step > 0.0)) throw InvalidArgument("spectrum grid must be non-empty with positive step");
    const auto m = model::assemble_undriven(config);
    const auto& l = m.liouvillian;
    const auto rho0 = m.emission_initial_state(config.initial_mode_state);
    const auto chi = quantum::time_integrated_source(l, rho0, m.sigma_a);
    const auto a_left = m.sigma_a.adjoint();

    const UniformGrid omega{units::energy_to_angular(detuning_meV.start), units::energy_to_angular(detuning_meV.step), detuning_meV.size};
    const bool cells = options.sampling == SpectrumSampling::cell_average;

    const quantum::CorrelatorTransform transform(l, a_left, chi);
    const double g0 = transform.initial_value().real();
    if (!(g0 > 0.0)) throw NumericalError("emission correlator vanishes at zero delay");
    const double b2 = m.mean_displacement * m.mean_displacement;

    SpectrumResult r;
    r.detuning_meV = detuning_meV;
    r.dwf = b2;
    r.polaron_shift_meV = m.polaron_shift_meV;
    r.s_zpl_lv = cells ? transform.real_cell_averages(omega, options.threads) : transform.real_point_values(omega, options.threads);
    for (double& v : r.s_zpl_lv) v *= b2 / g0;
    r.s_sb.assign(omega.size, 0.0);

    if (config.bulk_bath.alpha_ps2 > 0.0) {
        const bath::PhononBath bath(config.bulk_params(), config.temperature_K);
        double max_frequency = std::max(std::abs(omega.start), std::abs(omega.back()));
        for (const auto& mode : config.modes)
            max_frequency = std::max(max_frequency, units::energy_to_angular(mode.delta_meV) + 8.0 * config.bulk_params().xi_per_ps);
        const double step = std::min(kMaxSidebandStep, std::numbers::pi / (4.0 * max_frequency));

        const double window_tol = 0.5 * options.tail_tolerance / std::max(1.0 - b2, 1e-300);
        const auto window = bath.decay_window(window_tol, options.max_window_ps);
        if (!window)
            throw NumericalError("sideband delay window exceeds " + std::to_string(options.max_window_ps) +
                                 " ps before the phonon correlation decays");
        const UniformGrid tau{0.0, step, static_cast<std::size_t>(std::ceil(*window / step)) + 2};
        const auto g = quantum::regression_correlator(l, a_left, chi, tau).values;
        const auto big_g = bath.correlation_G(tau).values;

        std::vector<Complex> weighted(tau.size);
        for (std::size_t k = 0; k < tau.size; ++k) {
            const double trap = (k == 0 || k + 1 == tau.size) ? 0.5 * step : step;
            const double cell = cells ? sinc(0.5 * omega.step * tau[k]) : 1.0;
            weighted[k] = (trap * cell / g0) * g[k] * (big_g[k] - b2);
        }
        const double tail = std::abs(g.back() * (big_g.back() - b2));
        if (!(tail < options.tail_tolerance * std::abs(g.front())))
            throw NumericalError("sideband delay window too short: tail " + std::to_string(tail / std::abs(g.front())) +
                                 " relative to the zero-delay correlator");
        r.s_sb = half_fourier(weighted, step, omega, options.threads);
        r.sideband_window_ps = tau.back();
    }

    if (config.instrument_fwhm_meV && *config.instrument_fwhm_meV > 0.0) {
        r.s_zpl_lv = gaussian_convolve(r.s_zpl_lv, detuning_meV.step, *config.instrument_fwhm_meV, Padding::edge);
        r.s_sb = gaussian_convolve(r.s_sb, detuning_meV.step, *config.instrument_fwhm_meV, Padding::edge);
    }

    r.s_total.resize(omega.size);
    for (std::size_t k = 0; k < omega.size; ++k) r.s_total[k] = r.s_zpl_lv[k] + r.s_sb[k];
    r.metadata = {{"config", model::config_to_json(config)},
                  {"sampling", cells ? "cell_average" : "point"},
                  {"sideband_window_ps", r.sideband_window_ps}};
    return r;
}

std::vector<SpectralPeak> find_peaks(const UniformGrid& grid, const std::vector<double>& values, double min_relative_prominence) {
    std::vector<SpectralPeak> peaks;
    const std::size_t n = values.size();
    if (n < 3) return peaks;
    const double top = *std::max_element(values.begin(), values.end());
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(values[k] > values[k - 1] && values[k] >= values[k + 1])) continue;
        double left_min = values[k];
        for (std::size_t i = k; i-- > 0;) {
            if (values[i] > values[k]) break;
            left_min = std::min(left_min, values[i]);
        }
        double right_min = values[k];
        for (std::size_t i = k + 1; i < n; ++i) {
            if (values[i] > values[k]) break;
            right_min = std::min(right_min, values[i]);
        }
        const double prominence = values[k] - std::max(left_min, right_min);
        if (prominence > min_relative_prominence * top) peaks.push_back({grid[k], values[k], prominence});
    }
    return peaks;
}

}  // namespace molspec::observables

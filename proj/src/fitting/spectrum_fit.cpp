#include "molspec/fitting/spectrum_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "molspec/core/errors.hpp"
#include "molspec/observables/spectrum.hpp"

namespace molspec::fitting {

namespace {

constexpr double kFailedResidual = 50.0;

struct ModeSlot {
    enum Kind { delta, eta } kind;
    std::size_t index;
};

std::optional<ModeSlot> mode_slot(const std::string& name, std::size_t n_modes) {
    for (auto [prefix, kind] : {std::pair{"delta_", ModeSlot::delta}, std::pair{"eta_", ModeSlot::eta}}) {
        const std::string p = prefix;
        if (name.rfind(p, 0) != 0) continue;
        const std::string digits = name.substr(p.size());
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw InvalidArgument("malformed mode parameter name '" + name + "'");
        const auto i = static_cast<std::size_t>(std::stoul(digits));
        if (i < 1 || i > n_modes) throw InvalidArgument("parameter '" + name + "' refers to a mode that is not configured");
        return ModeSlot{kind, i - 1};
    }
    return std::nullopt;
}

double& config_slot(model::ModelConfig& c, const std::string& name) {
    if (auto m = mode_slot(name, c.modes.size())) return m->kind == ModeSlot::delta ? c.modes[m->index].delta_meV : c.modes[m->index].eta_meV;
    if (name == "alpha") return c.bulk_bath.alpha_ps2;
    if (name == "xi") return c.bulk_bath.xi_meV;
    if (name == "lv_scale") return c.lv_bath.scale;
    if (name == "zeta") return c.lv_bath.zeta_meV;
    if (name == "mu") return c.dephasing.mu_ps6;
    throw InvalidArgument("unknown spectrum fit parameter '" + name + "'");
}

Bounds default_bounds(const std::string& name, double initial) {
    const double inf = std::numeric_limits<double>::infinity();
    if (name.rfind("delta_", 0) == 0) return {0.5 * initial, 1.5 * initial};
    if (name.rfind("eta_", 0) == 0) return {0.0, std::max(2.0 * initial, 1.0)};
    if (name == "xi" || name == "zeta") return {0.05 * initial, 20.0 * initial};
    if (name == "offset") return {-1.0, 1.0};
    return {0.0, inf};
}

void sort_modes(model::ModelConfig& c) {
    std::stable_sort(c.modes.begin(), c.modes.end(), [](const model::ModeSpec& a, const model::ModeSpec& b) { return a.delta_meV < b.delta_meV; });
}

bool uniform_axis(const std::vector<double>& x) { return UniformGrid::is_uniform(x, 1e-9); }

// S_total on an arbitrary ascending axis: direct on a uniform axis, otherwise evaluated on a uniform
// grid at the finest data spacing and interpolated linearly.
std::vector<double> raw_spectrum(const model::ModelConfig& config, const std::vector<double>& x, int threads) {
    observables::SpectrumOptions opt;
    opt.threads = threads;
    const std::size_t n = x.size();
    if (uniform_axis(x)) {
        const UniformGrid grid{x.front(), (x.back() - x.front()) / static_cast<double>(n - 1), n};
        return observables::emission_spectrum(config, grid, opt).s_total;
    }
    double step = x.back() - x.front();
    for (std::size_t k = 1; k < n; ++k) step = std::min(step, x[k] - x[k - 1]);
    const auto grid = UniformGrid::spanning(x.front(), x.back() + step, step);
    const auto s = observables::emission_spectrum(config, grid, opt).s_total;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (x[k] - grid.start) / step;
        const auto i = std::min(static_cast<std::size_t>(u), grid.size - 2);
        const double f = u - static_cast<double>(i);
        out[k] = (1.0 - f) * s[i] + f * s[i + 1];
    }
    return out;
}

}  // namespace

std::vector<double> spectrum_on_axis(const model::ModelConfig& config, const std::vector<double>& detuning_meV, int threads) {
    auto s = raw_spectrum(config, detuning_meV, threads);
    const double peak = *std::max_element(s.begin(), s.end());
    for (double& v : s) v /= peak;
    return s;
}

SpectrumFit fit_spectrum(const SpectrumData& data, const model::ModelConfig& initial, const std::vector<std::string>& free_params,
                         const std::map<std::string, Bounds>& bounds, const SpectrumFitOptions& options) {
    data.validate();
    model::ModelConfig base = initial;
    sort_modes(base);
    base.validate();

    std::vector<ParameterSpec> specs;
    for (const auto& name : free_params) {
        if (std::find_if(specs.begin(), specs.end(), [&](const ParameterSpec& s) { return s.name == name; }) != specs.end())
            throw InvalidArgument("fit parameter '" + name + "' listed twice");
        double x0 = 0.0;
        if (name == "amplitude") {
            x0 = 1.0;
        } else if (name == "offset") {
            x0 = 0.0;
        } else {
            x0 = config_slot(base, name);
        }
        const auto it = bounds.find(name);
        specs.push_back({name, x0, it != bounds.end() ? it->second : default_bounds(name, x0)});
    }

    const double peak = data.peak();
    if (!(peak > 0.0)) throw DataError(0, "spectrum has no positive intensity");
    const double floor = options.log_floor * peak;
    const auto s_init = raw_spectrum(base, data.detuning_meV, options.threads);
    const double s_ref = *std::max_element(s_init.begin(), s_init.end());
    std::vector<double> log_data(data.intensity.size());
    for (std::size_t k = 0; k < log_data.size(); ++k) log_data[k] = std::log(std::max(data.intensity[k], floor));

    struct Evaluated {
        model::ModelConfig config;
        double amplitude = 1.0, offset = 0.0;
    };
    auto apply = [&](std::span<const double> p) {
        Evaluated e{base};
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (specs[i].name == "amplitude") {
                e.amplitude = p[i];
            } else if (specs[i].name == "offset") {
                e.offset = p[i];
            } else {
                config_slot(e.config, specs[i].name) = p[i];
            }
        }
        sort_modes(e.config);
        return e;
    };
    auto model_values = [&](const Evaluated& e) {
        auto s = raw_spectrum(e.config, data.detuning_meV, options.threads);
        for (double& v : s) v = e.amplitude * peak * v / s_ref + e.offset * peak;
        return s;
    };

    int failures = 0;
    auto residuals = [&](std::span<const double> p) {
        std::vector<double> r(log_data.size(), kFailedResidual);
        try {
            const auto e = apply(p);
            e.config.validate();
            const auto m = model_values(e);
            for (std::size_t k = 0; k < r.size(); ++k) r[k] = std::log(std::max(m[k], floor)) - log_data[k];
        } catch (const InvalidArgument&) {
            ++failures;
        } catch (const NumericalError&) {
            ++failures;
        }
        return r;
    };

    LeastSquaresOptions ls;
    ls.simplex.max_evaluations = options.max_evaluations;
    ls.simplex.max_restarts = options.max_restarts;
    ls.simplex.seed = options.seed;
    ls.simplex.f_tolerance = 1e-10;
    ls.simplex.x_tolerance = 1e-7;
    ls.simplex.initial_step = 0.02;
    ls.polish_iterations = options.polish_iterations;
    FitResult fit = fit_least_squares(residuals, specs, ls);
    fit.failed_evaluations = failures;

    std::vector<double> best;
    for (const auto& p : fit.parameters) best.push_back(p.value);
    const Evaluated e = apply(best);

    // Re-label delta_i / eta_i in ascending-Δ order.
    model::ModelConfig unsorted = base;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (mode_slot(specs[i].name, base.modes.size())) config_slot(unsorted, specs[i].name) = best[i];
    std::vector<std::size_t> order(unsorted.modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return unsorted.modes[a].delta_meV < unsorted.modes[b].delta_meV; });
    std::vector<FitParameter> relabelled = fit.parameters;
    for (auto& p : relabelled) {
        const auto slot = mode_slot(p.name, base.modes.size());
        if (!slot) continue;
        const std::size_t source = order[slot->index];
        const std::string source_name = (slot->kind == ModeSlot::delta ? "delta_" : "eta_") + std::to_string(source + 1);
        const auto it = std::find_if(fit.parameters.begin(), fit.parameters.end(), [&](const FitParameter& q) { return q.name == source_name; });
        if (it != fit.parameters.end()) {
            p.value = it->value;
            p.uncertainty = it->uncertainty;
        } else {
            p.value = slot->kind == ModeSlot::delta ? e.config.modes[slot->index].delta_meV : e.config.modes[slot->index].eta_meV;
            p.uncertainty = std::numeric_limits<double>::quiet_NaN();
        }
    }
    fit.parameters = std::move(relabelled);

    SpectrumFit out{fit, e.config, e.amplitude, e.offset, {}};
    if (failures < fit.n_evaluations) out.model_intensity = model_values(e);
    return out;
}

}  // namespace molspec::fitting

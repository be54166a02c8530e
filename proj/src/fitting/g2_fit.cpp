#include "molspec/fitting/g2_fit.hpp"

#include <cmath>
#include <limits>

#include "molspec/core/errors.hpp"
#include "molspec/observables/convolution.hpp"
#include "molspec/observables/g2.hpp"

namespace molspec::fitting {

namespace {

constexpr double kDefaultJitterPs = 50.0;
constexpr double kFailedResidual = 10.0;

LeastSquaresOptions least_squares_options(const G2FitOptions& o) {
    LeastSquaresOptions ls;
    ls.simplex.max_evaluations = o.max_evaluations;
    ls.simplex.max_restarts = o.max_restarts;
    ls.simplex.seed = o.seed;
    ls.simplex.f_tolerance = 1e-10;
    ls.simplex.x_tolerance = 1e-8;
    ls.polish_iterations = o.polish_iterations;
    return ls;
}

void check_trace(const observables::CorrelationTrace& trace) {
    if (trace.values.size() != trace.tau_ns.size || trace.values.size() < 3) throw InvalidArgument("g2 trace needs at least 3 samples on its delay grid");
    for (double v : trace.values)
        if (!std::isfinite(v)) throw DataError(0, "g2 trace contains a non-finite value");
}

}  // namespace

G2Fit fit_g2_resonant(const observables::CorrelationTrace& trace, const model::ModelConfig& config, const G2FitOptions& options) {
    check_trace(trace);
    if (!config.drive) throw InvalidArgument("resonant g2 fit needs a drive section for the initial amplitude");
    if (std::abs(trace.tau_ns.start) > 1e-12) throw InvalidArgument("resonant g2 fit needs a one-sided trace starting at zero delay");

    std::vector<ParameterSpec> specs{{"omega", config.drive->omega_meV, {0.0, std::numeric_limits<double>::infinity()}}};
    if (options.fit_jitter) specs.push_back({"jitter_ps", config.jitter_fwhm_ps.value_or(kDefaultJitterPs), {0.0, 1e4}});
    const double fixed_jitter = config.jitter_fwhm_ps.value_or(0.0);

    auto model = [&](std::span<const double> p) {
        model::ModelConfig c = config;
        c.drive->omega_meV = p[0];
        const double jitter = options.fit_jitter ? p[1] : fixed_jitter;
        auto g = observables::g2_resonant(c, trace.tau_ns);
        if (jitter > 0.0) g = observables::convolve_jitter(g, jitter, observables::Padding::reflect);
        return g.values;
    };
    int failures = 0;
    auto residuals = [&](std::span<const double> p) {
        std::vector<double> r(trace.values.size(), kFailedResidual);
        try {
            const auto m = model(p);
            for (std::size_t k = 0; k < r.size(); ++k) r[k] = m[k] - trace.values[k];
        } catch (const Error&) {
            ++failures;
        }
        return r;
    };
    G2Fit out{fit_least_squares(residuals, specs, least_squares_options(options)), {}};
    out.result.failed_evaluations = failures;
    std::vector<double> best;
    for (const auto& p : out.result.parameters) best.push_back(p.value);
    out.model = model(best);
    return out;
}

G2Fit fit_g2_nonresonant(const observables::CorrelationTrace& trace, double gamma1_per_ns, double visibility0, double saturation0,
                         const G2FitOptions& options) {
    check_trace(trace);
    if (!(gamma1_per_ns > 0.0)) throw InvalidArgument("gamma1_per_ns must be positive");
    const std::vector<ParameterSpec> specs{{"visibility", visibility0, {0.0, 1.0}},
                                           {"saturation", saturation0, {0.0, std::numeric_limits<double>::infinity()}}};
    auto model = [&](std::span<const double> p) {
        std::vector<double> m(trace.values.size());
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = observables::g2_nonresonant_model(trace.tau_ns[k], p[0], p[1], gamma1_per_ns);
        return m;
    };
    auto residuals = [&](std::span<const double> p) {
        auto m = model(p);
        for (std::size_t k = 0; k < m.size(); ++k) m[k] -= trace.values[k];
        return m;
    };
    G2Fit out{fit_least_squares(residuals, specs, least_squares_options(options)), {}};
    std::vector<double> best;
    for (const auto& p : out.result.parameters) best.push_back(p.value);
    out.model = model(best);
    return out;
}

}  // namespace molspec::fitting

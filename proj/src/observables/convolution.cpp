#include "molspec/observables/convolution.hpp"

#include <cmath>

#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::observables {

namespace {

constexpr double kFwhmPerSigma = 2.3548;

std::ptrdiff_t wrap_index(std::ptrdiff_t k, std::ptrdiff_t n, Padding padding) {
    if (k >= 0 && k < n) return k;
    switch (padding) {
        case Padding::edge:
            return k < 0 ? 0 : n - 1;
        case Padding::periodic:
            return ((k % n) + n) % n;
        case Padding::reflect: {
            // Mirror about the end samples without repeating them: −1 → 1, n → n − 2.
            const std::ptrdiff_t period = 2 * (n - 1);
            std::ptrdiff_t m = ((k % period) + period) % period;
            return m < n ? m : period - m;
        }
    }
    return k;
}

}  // namespace

std::vector<double> gaussian_convolve(std::span<const double> values, double step, double fwhm, Padding padding) {
    if (!(fwhm >= 0.0)) throw InvalidArgument("convolution FWHM must be non-negative");
    if (fwhm == 0.0) return {values.begin(), values.end()};
    if (values.size() < 2 || !(step > 0.0)) throw InvalidArgument("convolution needs at least two samples and a positive step");
    const double window = step * static_cast<double>(values.size() - 1);
    if (fwhm > 0.5 * window) throw InvalidArgument("Gaussian kernel FWHM exceeds half of the trace window");

    const double sigma = fwhm / kFwhmPerSigma;
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(6.0 * sigma / step));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
        const double x = static_cast<double>(j) * step / sigma;
        kernel[static_cast<std::size_t>(j + radius)] = std::exp(-0.5 * x * x);
        sum += kernel[static_cast<std::size_t>(j + radius)];
    }
    for (double& w : kernel) w /= sum;

    const auto n = static_cast<std::ptrdiff_t>(values.size());
    std::vector<double> out(values.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = -radius; j <= radius; ++j)
            acc += kernel[static_cast<std::size_t>(j + radius)] * values[static_cast<std::size_t>(wrap_index(i - j, n, padding))];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

CorrelationTrace convolve_jitter(const CorrelationTrace& trace, double fwhm_ps, Padding padding) {
    if (trace.values.size() != trace.tau_ns.size) throw InvalidArgument("trace values do not match its delay grid");
    return {trace.tau_ns, gaussian_convolve(trace.values, trace.tau_ns.step, units::ps_to_ns(fwhm_ps), padding), trace.normalized};
}

CorrelationTrace symmetrize(const CorrelationTrace& one_sided) {
    const auto& g = one_sided.tau_ns;
    if (g.size == 0 || g.start != 0.0) throw InvalidArgument("symmetrize needs a one-sided trace starting at τ = 0");
    const std::size_t n = g.size;
    CorrelationTrace out{{-g.back(), g.step, 2 * n - 1}, std::vector<double>(2 * n - 1), one_sided.normalized};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[n - 1 + k] = one_sided.values[k];
        out.values[n - 1 - k] = one_sided.values[k];
    }
    return out;
}

}  // namespace molspec::observables

#pragma once

#include <span>
#include <vector>

#include "molspec/observables/trace.hpp"

namespace molspec::observables {

enum class Padding { edge, periodic, reflect };

/// Discrete convolution with a unit-sum Gaussian of the given FWHM (σ = fwhm/2.3548), sampled at the
/// grid step and truncated at ±6σ. fwhm = 0 returns the input. InvalidArgument if the kernel FWHM
/// exceeds half the sampled window.
std::vector<double> gaussian_convolve(std::span<const double> values, double step, double fwhm, Padding padding = Padding::edge);

/// Detector-jitter convolution of a trace; fwhm in ps, the trace grid in ns.
CorrelationTrace convolve_jitter(const CorrelationTrace& trace, double fwhm_ps, Padding padding = Padding::edge);

}  // namespace molspec::observables

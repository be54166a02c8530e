#pragma once

#include <span>

#include "molspec/fitting/fit_result.hpp"

namespace molspec::fitting {

/// y = amplitude·(w/2)² / ((x − centre)² + (w/2)²) + offset.
struct LorentzianFit {
    double centre = 0.0;
    double fwhm = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    FitResult fit;
};

double lorentzian(double x, double centre, double fwhm, double amplitude, double offset);

/// Least-squares Lorentzian on the peak of (x, y). InvalidArgument unless at least
/// kMinPointsAcrossFwhm samples lie above half maximum.
LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kMinPointsAcrossFwhm = 8;

}  // namespace molspec::fitting

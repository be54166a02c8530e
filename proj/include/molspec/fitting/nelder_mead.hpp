#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace molspec::fitting {

struct Bounds {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lower && x <= upper; }
    double clamp(double x) const { return x < lower ? lower : (x > upper ? upper : x); }
};

struct SimplexOptions {
    int max_evaluations = 2000;
    int max_restarts = 3;
    double f_tolerance = 1e-12;  // relative spread of vertex values
    double x_tolerance = 1e-9;   // relative simplex diameter
    double initial_step = 0.05;  // relative to |x0| (absolute when x0 = 0)
    std::uint64_t seed = 1;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    int restarts = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder–Mead with dimension-adaptive coefficients. Points outside `bounds` are evaluated at their
/// projection plus a quadratic penalty, so the returned minimizer always lies within bounds.
/// After each convergence the simplex is rebuilt around the best point with seeded random step
/// signs; the run is converged once a restart neither improves the value beyond f_tolerance nor moves
/// the best point beyond x_tolerance.
SimplexResult minimize_simplex(const Objective& f, std::vector<double> x0, std::span<const Bounds> bounds,
                               const SimplexOptions& options = {});

}  // namespace molspec::fitting

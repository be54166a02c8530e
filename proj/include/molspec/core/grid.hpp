#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "molspec/core/errors.hpp"

namespace molspec {

/// Uniform one-dimensional grid: start + k * step for k in [0, size).
struct UniformGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t size = 0;

    double operator[](std::size_t k) const { return start + static_cast<double>(k) * step; }
    double back() const { return (*this)[size - 1]; }

    std::vector<double> points() const {
        std::vector<double> out(size);
        for (std::size_t k = 0; k < size; ++k) out[k] = (*this)[k];
        return out;
    }

    /// Grid covering [lo, hi] with the given step; hi is included when it lies on the lattice.
    static UniformGrid spanning(double lo, double hi, double step) {
        if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("uniform grid needs step > 0 and hi >= lo");
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        return UniformGrid{lo, step, n};
    }

    /// Detects whether explicit points form a uniform grid (relative tolerance on the spacing).
    static bool is_uniform(std::span<const double> pts, double rel_tol = 1e-9) {
        if (pts.size() < 2) return true;
        const double h = (pts.back() - pts.front()) / static_cast<double>(pts.size() - 1);
        if (!(h > 0.0)) return false;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (std::abs(pts[k] - (pts.front() + static_cast<double>(k) * h)) > rel_tol * std::abs(h) * static_cast<double>(pts.size())) return false;
        }
        return true;
    }
};

template <class T>
struct SampledFunction {
    UniformGrid grid;
    std::vector<T> values;
};

using ComplexSamples = SampledFunction<std::complex<double>>;
using RealSamples = SampledFunction<double>;

}  // namespace molspec

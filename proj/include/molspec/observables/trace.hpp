#pragma once

#include <vector>

#include "molspec/core/grid.hpp"

namespace molspec::observables {

/// Second-order correlation sampled on a uniform delay grid in ns.
struct CorrelationTrace {
    UniformGrid tau_ns;
    std::vector<double> values;
    bool normalized = true;
};

/// Mirrors a one-sided trace starting at τ = 0 onto [−τ_max, τ_max] using g(−τ) = g(τ).
CorrelationTrace symmetrize(const CorrelationTrace& one_sided);

}  // namespace molspec::observables

#pragma once

#include <span>
#include <vector>

namespace molspec::bath {

/// Flattened composite quadrature rule: Σ weights[k]·f(nodes[k]) ≈ ∫ f.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss–Legendre panels of kGaussOrder nodes between consecutive breakpoints.
inline constexpr int kGaussOrder = 16;
QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints);

/// Breakpoints on [0, upper]: geometric widths doubling from `fine_width` until they reach
/// `coarse_width`, then uniform panels of at most `coarse_width`.
std::vector<double> graded_breakpoints(double upper, double fine_width, double coarse_width);

/// Same breakpoints with every panel split in two (for grid-doubling checks).
std::vector<double> refine_breakpoints(std::span<const double> breakpoints);

}  // namespace molspec::bath

#include "molspec/bath/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>

#include "molspec/core/errors.hpp"

namespace molspec::bath {

QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints) {
    using Gauss = boost::math::quadrature::gauss<double, kGaussOrder>;
    const auto& abscissa = Gauss::abscissa();  // non-negative half, zero first for odd orders
    const auto& weight = Gauss::weights();
    QuadratureRule rule;
    if (breakpoints.size() < 2) return rule;
    rule.nodes.reserve((breakpoints.size() - 1) * kGaussOrder);
    rule.weights.reserve(rule.nodes.capacity());
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double lo = breakpoints[p], hi = breakpoints[p + 1];
        if (!(hi > lo)) throw InvalidArgument("quadrature breakpoints must be strictly increasing");
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < abscissa.size(); ++k) {
            const double x = abscissa[k];
            if (x == 0.0) {
                rule.nodes.push_back(mid);
                rule.weights.push_back(half * weight[k]);
                continue;
            }
            rule.nodes.push_back(mid - half * x);
            rule.weights.push_back(half * weight[k]);
            rule.nodes.push_back(mid + half * x);
            rule.weights.push_back(half * weight[k]);
        }
    }
    return rule;
}

std::vector<double> graded_breakpoints(double upper, double fine_width, double coarse_width) {
    if (!(upper > 0.0) || !(coarse_width > 0.0)) throw InvalidArgument("quadrature range and panel width must be positive");
    fine_width = std::clamp(fine_width, 1e-12 * upper, coarse_width);
    std::vector<double> out{0.0};
    double w = fine_width;
    while (out.back() + w < upper && w < coarse_width) {
        out.push_back(out.back() + w);
        w *= 2.0;
    }
    const double rest = upper - out.back();
    const auto panels = static_cast<std::size_t>(std::ceil(rest / coarse_width - 1e-12));
    const double h = rest / static_cast<double>(std::max<std::size_t>(panels, 1));
    const double start = out.back();
    for (std::size_t k = 1; k <= std::max<std::size_t>(panels, 1); ++k) out.push_back(start + static_cast<double>(k) * h);
    out.back() = upper;
    return out;
}

std::vector<double> refine_breakpoints(std::span<const double> breakpoints) {
    std::vector<double> out;
    if (breakpoints.empty()) return out;
    out.reserve(2 * breakpoints.size());
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        out.push_back(breakpoints[k]);
        out.push_back(0.5 * (breakpoints[k] + breakpoints[k + 1]));
    }
    out.push_back(breakpoints.back());
    return out;
}

}  // namespace molspec::bath

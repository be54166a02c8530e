#include "molspec/fitting/linescan.hpp"

#include <cmath>
#include <numbers>

#include "molspec/core/errors.hpp"

namespace molspec::fitting {

namespace {

Gamma2Extraction from_line(double a, double b, double var_a, double var_b, double cov_ab) {
    if (!(a > 0.0)) throw InvalidArgument("zero-power intercept of the squared linewidth is not positive; data inconsistent with power broadening");
    Gamma2Extraction g;
    g.intercept_MHz2 = a;
    g.slope_MHz2_per_power = b;
    g.zero_power_linewidth_MHz = std::sqrt(a);
    g.gamma2_MHz = std::numbers::pi * g.zero_power_linewidth_MHz;
    g.gamma2_per_ps = g.gamma2_MHz * 1e-6;
    g.p_sat = a / b;
    // δΓ₂ = π δa / (2√a); P_sat = a/b.
    g.gamma2_uncertainty_MHz = std::numbers::pi * std::sqrt(var_a) / (2.0 * std::sqrt(a));
    const double da = 1.0 / b, db = -a / (b * b);
    g.p_sat_uncertainty = std::sqrt(std::max(0.0, da * da * var_a + db * db * var_b + 2.0 * da * db * cov_ab));
    return g;
}

}  // namespace

Gamma2Extraction extract_gamma2(const LineScanSeries& series) {
    series.validate();
    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : series.points) {
        const double y = p.linewidth_MHz * p.linewidth_MHz;
        const double sigma = 2.0 * p.linewidth_MHz * p.uncertainty_MHz;
        const double w = 1.0 / (sigma * sigma);
        s += w;
        sx += w * p.power;
        sy += w * y;
        sxx += w * p.power * p.power;
        sxy += w * p.power * y;
    }
    const double det = s * sxx - sx * sx;
    if (!(det > 0.0)) throw InvalidArgument("line scan needs at least two distinct power levels");
    const double a = (sxx * sy - sx * sxy) / det;
    const double b = (s * sxy - sx * sy) / det;
    auto g = from_line(a, b, sxx / det, s / det, -sx / det);
    for (const auto& p : series.points) {
        const double y = p.linewidth_MHz * p.linewidth_MHz;
        const double sigma = 2.0 * p.linewidth_MHz * p.uncertainty_MHz;
        g.chi2 += std::pow((y - a - b * p.power) / sigma, 2);
    }
    return g;
}

Gamma2Extraction gamma2_from_two_levels(const LineScanPoint& p, const LineScanPoint& q) {
    if (p.power == q.power) throw InvalidArgument("two-level extraction needs distinct powers");
    const double yp = p.linewidth_MHz * p.linewidth_MHz, yq = q.linewidth_MHz * q.linewidth_MHz;
    const double b = (yq - yp) / (q.power - p.power);
    return from_line(yp - b * p.power, b, 0.0, 0.0, 0.0);
}

}  // namespace molspec::fitting

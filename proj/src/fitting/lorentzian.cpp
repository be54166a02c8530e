#include "molspec/fitting/lorentzian.hpp"

#include <algorithm>
#include <cmath>

#include "molspec/core/errors.hpp"

namespace molspec::fitting {

double lorentzian(double x, double centre, double fwhm, double amplitude, double offset) {
    const double h = 0.5 * fwhm, d = x - centre;
    return amplitude * h * h / (d * d + h * h) + offset;
}

LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4) throw InvalidArgument("Lorentzian fit needs matching x and y with at least 4 points");
    const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double base = *std::min_element(y.begin(), y.end());
    const double half = base + 0.5 * (y[top] - base);
    std::size_t l = top, r = top;
    while (l > 0 && y[l - 1] > half) --l;
    while (r + 1 < y.size() && y[r + 1] > half) ++r;
    const std::size_t across = r - l + 1;
    if (across < kMinPointsAcrossFwhm)
        throw InvalidArgument("Lorentzian fit needs at least " + std::to_string(kMinPointsAcrossFwhm) + " points across the FWHM, found " +
                              std::to_string(across));

    const double scale = y[top] - base;
    const double width0 = std::max(x[r] - x[l], 1e-300);
    const std::vector<ParameterSpec> params{
        {"centre", x[top], {x.front(), x.back()}},
        {"fwhm", width0, {0.0, 10.0 * (x.back() - x.front())}},
        {"amplitude", scale, {0.0, 10.0 * scale}},
        {"offset", base, {}},
    };
    auto residuals = [&](std::span<const double> p) {
        std::vector<double> res(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) res[k] = (lorentzian(x[k], p[0], p[1], p[2], p[3]) - y[k]) / scale;
        return res;
    };
    LeastSquaresOptions opt;
    opt.simplex.max_evaluations = 4000;
    const FitResult fit = fit_least_squares(residuals, params, opt);
    return {fit.value("centre"), fit.value("fwhm"), fit.value("amplitude"), fit.value("offset"), fit};
}

}  // namespace molspec::fitting

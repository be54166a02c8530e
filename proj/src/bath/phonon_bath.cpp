#include "molspec/bath/phonon_bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::bath {

namespace {

constexpr double kDoublingTolerance = 1e-8;
constexpr std::size_t kReseedInterval = 256;

/// x·coth(x), finite at x → 0.
double x_coth_x(double x) {
    if (x < 1e-4) return 1.0 + x * x / 3.0;
    if (x > 20.0) return x;
    return x / std::tanh(x);
}

}  // namespace

double bose_occupation(double delta_meV, double temperature_K) {
    if (!(delta_meV > 0.0)) throw InvalidArgument("boson energy must be positive");
    if (!(temperature_K >= 0.0)) throw InvalidArgument("temperature must be non-negative");
    if (temperature_K == 0.0) return 0.0;
    return 1.0 / std::expm1(delta_meV / units::thermal_energy(temperature_K));
}

double bose_fluctuation(double delta_meV, double temperature_K) {
    if (!(delta_meV > 0.0)) throw InvalidArgument("boson energy must be positive");
    if (!(temperature_K >= 0.0)) throw InvalidArgument("temperature must be non-negative");
    if (temperature_K == 0.0) return 0.0;
    const double half = 0.5 * delta_meV / units::thermal_energy(temperature_K);
    if (half > 350.0) return 0.0;
    const double s = std::sinh(half);
    return 0.25 / (s * s);
}

void BulkBathParams::validate() const {
    if (!(alpha_ps2 >= 0.0) || !std::isfinite(alpha_ps2)) throw InvalidArgument("bulk bath alpha must be finite and non-negative");
    if (!(xi_per_ps > 0.0) || !std::isfinite(xi_per_ps)) throw InvalidArgument("bulk bath cutoff xi must be positive");
    if (!(omega_max() >= 8.0 * xi_per_ps * (1.0 - 1e-12))) throw InvalidArgument("bulk bath quadrature omega_max must be at least 8 xi");
    if (quadrature.n_points < kGaussOrder) throw InvalidArgument("bulk bath quadrature needs at least 16 points");
}

double j_bulk(double omega_per_ps, const BulkBathParams& params) {
    if (!(omega_per_ps >= 0.0)) throw InvalidArgument("spectral density is defined for omega >= 0");
    const double r = omega_per_ps / params.xi_per_ps;
    return params.alpha_ps2 * omega_per_ps * omega_per_ps * omega_per_ps * std::exp(-r * r);
}

PhononBath::PhononBath(const BulkBathParams& params, double temperature_K) : params_(params), temperature_K_(temperature_K) {
    params_.validate();
    if (!(temperature_K >= 0.0) || !std::isfinite(temperature_K)) throw InvalidArgument("temperature must be finite and non-negative");
    if (params_.alpha_ps2 == 0.0) return;
    const auto coarse = rule_for(0.0, false), fine = rule_for(0.0, true);
    auto integrate = [&](const QuadratureRule& rule, auto&& f) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) acc += rule.weights[k] * f(rule.nodes[k]);
        return acc;
    };
    auto cw = [this](double w) { return coth_weight(w); };
    phi0_ = integrate(coarse, cw);
    if (std::abs(integrate(fine, cw) - phi0_) > kDoublingTolerance * std::abs(phi0_))
        throw NumericalError("phi(0) quadrature did not converge under grid doubling");
    reorganization_ = integrate(coarse, [this](double w) { return j_bulk(w, params_) / w; });
}

double PhononBath::coth_weight(double omega) const {
    // J/ω² · coth(ħω/2k_BT) = α e^{−ω²/ξ²} · ω coth(x), ω coth(x) = (2k_BT/ħ)·x coth(x)
    const double r = omega / params_.xi_per_ps;
    const double gauss = params_.alpha_ps2 * std::exp(-r * r);
    if (temperature_K_ == 0.0) return gauss * omega;
    const double thermal = units::energy_to_angular(units::thermal_energy(temperature_K_));
    return gauss * 2.0 * thermal * x_coth_x(0.5 * omega / thermal);
}

QuadratureRule PhononBath::rule_for(double tau_max, bool refined) const {
    const double xi = params_.xi_per_ps;
    const double omega_max = params_.omega_max();
    double fine = xi / 8.0;
    if (temperature_K_ > 0.0) fine = std::min(fine, units::energy_to_angular(units::thermal_energy(temperature_K_)) / 8.0);
    double coarse = omega_max * kGaussOrder / static_cast<double>(params_.quadrature.n_points);
    if (tau_max > 0.0) coarse = std::min(coarse, 2.0 * std::numbers::pi / tau_max);
    auto bp = graded_breakpoints(omega_max, fine, coarse);
    if (refined) bp = refine_breakpoints(bp);
    return composite_gauss_legendre(bp);
}

std::vector<Complex> PhononBath::evaluate(const QuadratureRule& rule, const UniformGrid& tau) const {
    const std::size_t m = rule.size();
    std::vector<double> a(m), b(m);
    for (std::size_t j = 0; j < m; ++j) {
        a[j] = rule.weights[j] * coth_weight(rule.nodes[j]);
        const double r = rule.nodes[j] / params_.xi_per_ps;
        b[j] = rule.weights[j] * params_.alpha_ps2 * rule.nodes[j] * std::exp(-r * r);
    }
    std::vector<Complex> z(m), rot(m), out(tau.size);
    for (std::size_t j = 0; j < m; ++j) rot[j] = std::polar(1.0, rule.nodes[j] * tau.step);
    for (std::size_t k = 0; k < tau.size; ++k) {
        if (k % kReseedInterval == 0) {
            for (std::size_t j = 0; j < m; ++j) z[j] = std::polar(1.0, rule.nodes[j] * tau[k]);
        } else {
            for (std::size_t j = 0; j < m; ++j) z[j] *= rot[j];
        }
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            re += a[j] * z[j].real();
            im -= b[j] * z[j].imag();
        }
        out[k] = {re, im};
    }
    return out;
}

Complex PhononBath::phi(double tau_ps) const {
    if (!std::isfinite(tau_ps)) throw InvalidArgument("tau must be finite");
    if (params_.alpha_ps2 == 0.0) return 0.0;
    if (tau_ps == 0.0) return phi0_;
    const double t = std::abs(tau_ps);
    const UniformGrid one{t, 1.0, 1};
    const Complex coarse = evaluate(rule_for(t, false), one)[0];
    const Complex fine = evaluate(rule_for(t, true), one)[0];
    if (std::abs(fine - coarse) > kDoublingTolerance * std::max(phi0_, 1e-300))
        throw NumericalError("phi(tau) quadrature did not converge under grid doubling");
    // φ(−τ) = φ(τ)*
    return tau_ps < 0.0 ? std::conj(coarse) : coarse;
}

std::vector<Complex> PhononBath::phi(const UniformGrid& tau) const {
    if (tau.size == 0) return {};
    if (!(tau.start >= 0.0)) throw InvalidArgument("phi grid must start at tau >= 0");
    if (params_.alpha_ps2 == 0.0) return std::vector<Complex>(tau.size, 0.0);
    const double tau_max = tau.back();
    auto values = evaluate(rule_for(tau_max, false), tau);
    const auto refined = rule_for(tau_max, true);
    for (std::size_t k : {std::size_t{0}, tau.size / 2, tau.size - 1}) {
        const Complex check = evaluate(refined, UniformGrid{tau[k], 1.0, 1})[0];
        if (std::abs(check - values[k]) > kDoublingTolerance * std::max(phi0_, 1e-300))
            throw NumericalError("phi(tau) quadrature did not converge under grid doubling");
    }
    if (tau.start == 0.0) values[0] = phi0_;
    return values;
}

ComplexSamples PhononBath::correlation_G(const UniformGrid& tau) const {
    ComplexSamples out{tau, phi(tau)};
    const double b2 = debye_waller();
    for (auto& v : out.values) v = b2 * std::exp(v);
    return out;
}

std::optional<double> PhononBath::decay_window(double tol, double cap_ps) const {
    if (params_.alpha_ps2 == 0.0) return 0.0;
    const double b2 = debye_waller();
    const double scale = std::max(1.0 - b2, 1e-300);
    auto tail = [&](double t) { return b2 * std::abs(std::exp(phi(t)) - 1.0) / scale; };
    double t = 1.0 / params_.xi_per_ps;
    while (t <= cap_ps) {
        if (tail(t) <= tol && tail(1.25 * t) <= tol && tail(1.5 * t) <= tol && tail(2.0 * t) <= tol) return t;
        t *= 1.25;
    }
    return std::nullopt;
}

Complex phi(double tau_ps, double temperature_K, const BulkBathParams& params) {
    return PhononBath(params, temperature_K).phi(tau_ps);
}

PhononCorrelation phonon_correlation(const UniformGrid& tau, double temperature_K, const BulkBathParams& params) {
    const PhononBath bath(params, temperature_K);
    return {tau, bath.phi(tau), bath.mean_displacement(), temperature_K};
}

double mean_displacement(double temperature_K, const BulkBathParams& params) {
    return PhononBath(params, temperature_K).mean_displacement();
}

double debye_waller(double temperature_K, const BulkBathParams& params) { return PhononBath(params, temperature_K).debye_waller(); }

ComplexSamples phonon_correlation_G(const UniformGrid& tau, double temperature_K, const BulkBathParams& params) {
    return PhononBath(params, temperature_K).correlation_G(tau);
}

double solve_alpha_for_dwf(double target_dwf, double temperature_K, double xi_per_ps, const BulkQuadrature& quadrature) {
    if (!(target_dwf > 0.0 && target_dwf <= 1.0)) throw InvalidArgument("target Debye-Waller factor must lie in (0, 1]");
    if (target_dwf == 1.0) return 0.0;
    const PhononBath unit(BulkBathParams{1.0, xi_per_ps, quadrature}, temperature_K);
    return -std::log(target_dwf) / unit.phi0();
}

double one_sided_rate(std::span<const Complex> samples, double step, double xi_per_ps) {
    const std::size_t n = samples.size();
    if (n < 2) return 0.0;
    auto f = [&](std::size_t k) { return samples[k] * std::polar(1.0, xi_per_ps * step * static_cast<double>(k)); };
    const std::size_t simpson_end = (n - 1) % 2 == 0 ? n - 1 : n - 2;
    Complex acc = 0.0;
    if (simpson_end >= 2) {
        acc += f(0) + f(simpson_end);
        for (std::size_t k = 1; k < simpson_end; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f(k);
        acc *= step / 3.0;
    }
    if (simpson_end != n - 1) acc += 0.5 * step * (f(n - 2) + f(n - 1));
    return 2.0 * acc.real();
}

}  // namespace molspec::bath

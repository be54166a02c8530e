#include <doctest.h>

#include <cmath>
#include <numbers>

#include "molspec/bath/dephasing.hpp"
#include "molspec/bath/local_modes.hpp"
#include "molspec/bath/phonon_bath.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"
#include "oracles.hpp"

using namespace molspec;
using namespace molspec::bath;

namespace {

// α = 0.1 ps², ξ = 2 ps⁻¹. Reference values from 30-digit adaptive quadrature (T = 10 K) and the
// Dawson-function closed form (T = 0).
const BulkBathParams kBath{0.1, 2.0, {}};

struct PhiRef {
    double tau, re, im;
};
constexpr PhiRef kPhiZeroT[] = {
    {0.0, 0.2, 0.0},
    {0.5, 0.115112723299595541, -0.138038844704314297},
    {1.0, -0.0152318027651073677, -0.130409866434658437},
    {3.0, -0.0139252367326699448, -0.000131242909495758274},
};
constexpr PhiRef kPhiTenK[] = {
    {0.0, 0.506901825285498473, 0.0},
    {0.7, 0.285716505000740051, -0.152019281615394045},
    {2.5, -0.000252753554107410868, -0.00171082043387664244},
};

}  // namespace

TEST_CASE("bose occupation") {
    CHECK(bose_occupation(21.55, 0.0) == 0.0);
    const double t = 17.0;
    CHECK(bose_occupation(units::thermal_energy(t) * std::log(2.0), t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bose_occupation(21.55, 300.0) == doctest::Approx(0.76830324217879088671).epsilon(1e-14));
    CHECK_THROWS_AS(bose_occupation(0.0, 4.0), InvalidArgument);
    const double n = bose_occupation(3.0, 20.0);
    CHECK(bose_fluctuation(3.0, 20.0) == doctest::Approx(n * (n + 1.0)).epsilon(1e-13));
}

TEST_CASE("bulk spectral density") {
    CHECK(j_bulk(0.0, kBath) == 0.0);
    CHECK(j_bulk(1.3, BulkBathParams{0.0, 2.0, {}}) == 0.0);
    const double peak = kBath.xi_per_ps * std::sqrt(1.5);
    const double h = 1e-4;
    CHECK(j_bulk(peak, kBath) > j_bulk(peak - h, kBath));
    CHECK(j_bulk(peak, kBath) > j_bulk(peak + h, kBath));
    CHECK(std::abs(j_bulk(peak + h, kBath) - j_bulk(peak - h, kBath)) < 1e-9 * j_bulk(peak, kBath));
    CHECK_THROWS_AS(BulkBathParams({0.1, 2.0, {10.0, 1024}}).validate(), InvalidArgument);
}

TEST_CASE("phase correlation against reference values") {
    const PhononBath cold(kBath, 0.0);
    for (const auto& r : kPhiZeroT) {
        const auto v = cold.phi(r.tau);
        CHECK(std::abs(v.real() - r.re) < 1e-10);
        CHECK(std::abs(v.imag() - r.im) < 1e-10);
    }
    const PhononBath warm(kBath, 10.0);
    for (const auto& r : kPhiTenK) {
        const auto v = warm.phi(r.tau);
        CHECK(std::abs(v.real() - r.re) < 1e-10);
        CHECK(std::abs(v.imag() - r.im) < 1e-10);
    }
    CHECK(warm.phi(0.0).imag() == 0.0);
    CHECK(std::abs(warm.phi(-0.7) - std::conj(warm.phi(0.7))) < 1e-15);

    // Uniform-grid evaluation agrees with pointwise evaluation.
    const UniformGrid grid{0.0, 0.05, 101};
    const auto values = warm.phi(grid);
    for (std::size_t k = 0; k < grid.size; k += 10) CHECK(std::abs(values[k] - warm.phi(grid[k])) < 1e-12);

    // Reorganization energy ∫J/ω = α ξ³ √π / 4.
    CHECK(warm.reorganization() == doctest::Approx(0.1 * 8.0 * std::sqrt(std::numbers::pi) / 4.0).epsilon(1e-12));

    const PhononBath none(BulkBathParams{0.0, 2.0, {}}, 10.0);
    CHECK(none.phi(1.0) == std::complex<double>(0.0, 0.0));
    CHECK(none.debye_waller() == 1.0);
}

TEST_CASE("phonon correlation normalization and tail") {
    const PhononBath bath(kBath, 4.7);
    const UniformGrid grid{0.0, 0.01, 3001};
    const auto g = bath.correlation_G(grid);
    CHECK(std::abs(g.values[0] - 1.0) < 1e-8);
    const double b2 = bath.debye_waller();
    CHECK(std::abs(g.values.back() - b2) < 1e-6);
    CHECK(bath.mean_displacement() * bath.mean_displacement() == doctest::Approx(b2).epsilon(1e-15));
    const auto phis = bath.phi(grid);
    for (const auto& p : phis) CHECK(std::abs(std::exp(p)) <= std::exp(bath.phi0()) * (1.0 + 1e-12));
    // Re φ(τ) settles: the last stretch varies by less than the tail tolerance.
    CHECK(std::abs(phis.back() - phis[grid.size - 300]) < 1e-6);

    const auto none = phonon_correlation_G(grid, 4.7, BulkBathParams{0.0, 2.0, {}});
    for (const auto& v : none.values) CHECK(v == std::complex<double>(1.0, 0.0));

    const auto found = bath.decay_window(1e-8, 500.0);
    REQUIRE(found.has_value());
    const double window = *found;
    CHECK(window > 0.0);
    CHECK_FALSE(PhononBath(kBath, 0.0).decay_window(1e-8, 50.0).has_value());
    CHECK(b2 * std::abs(std::exp(bath.phi(window)) - 1.0) <= 1e-8 * (1.0 - b2));
}

TEST_CASE("Debye-Waller factor") {
    double prev = 1.0;
    for (double t : {0.0, 4.7, 10.0, 20.0, 31.0, 40.0}) {
        const double d = debye_waller(t, kBath);
        CHECK(d > 0.0);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(debye_waller(4.7, BulkBathParams{0.2, 2.0, {}}) < debye_waller(4.7, kBath));
    CHECK(debye_waller(0.0, kBath) == doctest::Approx(std::exp(-0.2)).epsilon(1e-13));

    const double xi = units::energy_to_angular(1.5);
    CHECK(solve_alpha_for_dwf(1.0, 4.7, xi) == 0.0);
    const double alpha = solve_alpha_for_dwf(0.72, 4.7, xi);
    CHECK(std::abs(debye_waller(4.7, BulkBathParams{alpha, xi, {}}) - 0.72) < 1e-6);
    CHECK(solve_alpha_for_dwf(0.5, 4.7, xi) > alpha);
    CHECK_THROWS_AS(solve_alpha_for_dwf(0.0, 4.7, xi), InvalidArgument);
    CHECK_THROWS_AS(solve_alpha_for_dwf(1.2, 4.7, xi), InvalidArgument);
}

TEST_CASE("one-sided response rate of a damped oscillation") {
    // C(τ) = e^{−(a + i b)τ}: 2 Re 1/(a + i(b − ξ)) = 2a/(a² + (b−ξ)²).
    const double a = 0.8, b = 3.0, h = 0.002;
    std::vector<std::complex<double>> c(20001);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::exp(-std::complex<double>(a, b) * (h * k));
    for (double xi : {0.0, 2.5, 3.0, 7.0}) {
        const double expect = 2.0 * a / (a * a + (b - xi) * (b - xi));
        CHECK(one_sided_rate(c, h, xi) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("local-mode damping") {
    const LocalModeBathParams p{0.01, units::energy_to_angular(10.0)};
    CHECK(kappa(30.0, LocalModeBathParams{0.0, 10.0}) == 0.0);
    const double peak = 3.0 * p.zeta_per_ps;
    CHECK(kappa(peak, p) > kappa(peak * (1.0 - 1e-4), p));
    CHECK(kappa(peak, p) > kappa(peak * (1.0 + 1e-4), p));
    const double d1 = units::energy_to_angular(21.55), d4 = units::energy_to_angular(36.31);
    CHECK(kappa(d1, p) / kappa(d4, p) == doctest::Approx(0.91470643008036879).epsilon(1e-13));
    CHECK(kappa(d1, p) == doctest::Approx(std::numbers::pi * 0.01 * std::pow(d1, 3) / std::pow(p.zeta_per_ps, 2) *
                                          std::exp(-d1 / p.zeta_per_ps)).epsilon(1e-14));
}

TEST_CASE("mode displacement expectation") {
    CHECK(mode_displacement_expectation(0.0, 21.55, 40.0) == doctest::Approx(1.0).epsilon(1e-15));
    oracle::Matrix gen(2, 2);
    gen << 0.0, -0.3, 0.3, 0.0;
    const auto b = oracle::series_expm(gen);
    CHECK(mode_displacement_expectation(0.3 * 21.55, 21.55, 0.0) == doctest::Approx(b(0, 0).real()).epsilon(1e-13));
    CHECK(mode_displacement_expectation(0.3 * 21.55, 21.55, 0.0) == doctest::Approx(std::cos(0.3)).epsilon(1e-13));
    CHECK(mode_displacement_expectation(0.3 * 21.55, 21.55, 300.0) == doctest::Approx(std::cos(0.3)).epsilon(1e-13));
    double prev = 1.0;
    for (double r = 0.01; r < 0.5; r += 0.01) {
        const double v = mode_displacement_expectation(r * 30.0, 30.0, 4.7);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("angular integral closed form against brute-force quadrature") {
    const double wc = 3.0;
    CHECK(angular_integral(0.0, wc) == doctest::Approx(32.0 / 5.0).epsilon(1e-15));
    for (int k = 0; k < 10; ++k) {
        const double w = 0.05 + 0.9 * k;  // spans the series/closed-form switch at c = 1
        auto integrand = [&](double theta) {
            const double u = 1.0 + std::cos(theta);
            return std::sin(theta) * u * u * u * u * std::exp(-2.0 * w * w * u / (wc * wc));
        };
        const double brute = oracle::composite_gauss(integrand, 0.0, std::numbers::pi, 64);
        CHECK(std::abs(angular_integral(w, wc) - brute) < 1e-8 * brute);
    }
    // Continuity across the switch.
    const double edge = wc / std::sqrt(2.0);
    CHECK(angular_integral(edge * (1.0 - 1e-9), wc) == doctest::Approx(angular_integral(edge * (1.0 + 1e-9), wc)).epsilon(1e-8));
}

TEST_CASE("pure dephasing rate") {
    const DephasingParams p{1e-3, units::energy_to_angular(3.0)};
    CHECK(pure_dephasing_rate(0.0, p) == 0.0);
    CHECK(pure_dephasing_rate(10.0, DephasingParams{2e-3, p.omega_c_per_ps}) == doctest::Approx(2.0 * pure_dephasing_rate(10.0, p)).epsilon(1e-14));
    double prev = 0.0;
    for (double t : {1.0, 4.7, 10.0, 20.0, 31.0, 40.0, 80.0}) {
        const double g = pure_dephasing_rate(t, p);
        CHECK(g > prev);
        prev = g;
    }

    // Nested (ω, θ) quadrature of the full double integral.
    const double t = 20.0;
    const double thermal = units::energy_to_angular(units::thermal_energy(t));
    auto outer = [&](double w) {
        if (w == 0.0) return 0.0;
        auto inner = [&](double theta) {
            const double u = 1.0 + std::cos(theta);
            return std::sin(theta) * u * u * u * u * std::exp(-2.0 * w * w * u / (p.omega_c_per_ps * p.omega_c_per_ps));
        };
        const double x = units::angular_to_energy(w) / units::thermal_energy(t);
        const double nn = std::exp(x) / ((std::exp(x) - 1.0) * (std::exp(x) - 1.0));
        return std::pow(w, 6) * nn * oracle::composite_gauss(inner, 0.0, std::numbers::pi, 16);
    };
    const double brute = p.mu_ps6 * oracle::composite_gauss(outer, 0.0, 60.0 * thermal, 200);
    CHECK(pure_dephasing_rate(t, p) == doctest::Approx(brute).epsilon(1e-8));

    // Low-temperature T⁷ law when ω_c ≫ k_BT/ħ.
    const DephasingParams wide{1.0, 1e7};
    CHECK(pure_dephasing_rate(2.0, wide) / pure_dephasing_rate(1.0, wide) == doctest::Approx(128.0).epsilon(1e-8));

    const double mu = solve_mu_for_rate(1e-3, 31.0, p.omega_c_per_ps);
    CHECK(pure_dephasing_rate(31.0, DephasingParams{mu, p.omega_c_per_ps}) == doctest::Approx(1e-3).epsilon(1e-13));
}

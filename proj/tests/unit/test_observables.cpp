#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <numeric>

#include "molspec/bath/dephasing.hpp"
#include "molspec/bath/phonon_bath.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"
#include "molspec/model/assemble.hpp"
#include "molspec/observables/convolution.hpp"
#include "molspec/observables/g2.hpp"
#include "molspec/observables/linewidth.hpp"
#include "molspec/observables/spectrum.hpp"
#include "molspec/quantum/dynamics.hpp"
#include "oracles.hpp"

using namespace molspec;
using namespace molspec::observables;
using model::ModelConfig;
using quantum::Complex;
using quantum::Matrix;

namespace {

ModelConfig bare_config() {
    ModelConfig c;
    c.bulk_bath = {0.0, 1.5, 0.0, 1024};
    c.lv_bath = {0.0, 10.0};
    c.dephasing = {0.0, 3.0};
    return c;
}

ModelConfig phonon_config(double dwf, double temperature_K) {
    ModelConfig c = bare_config();
    c.temperature_K = temperature_K;
    c.bulk_bath.alpha_ps2 = bath::solve_alpha_for_dwf(dwf, 4.7, units::energy_to_angular(c.bulk_bath.xi_meV));
    return c;
}

double sum_where(const SpectrumResult& r, const std::vector<double>& v, double lo, double hi) {
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = r.detuning_meV[k];
        if (d > lo && d <= hi) acc += v[k];
    }
    return acc;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Full width at half maximum of the peak nearest zero detuning by linear interpolation.
double half_max_width(const UniformGrid& grid, const std::vector<double>& v) {
    const auto top = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const double half = 0.5 * v[top];
    std::size_t l = top, r = top;
    while (l > 0 && v[l] > half) --l;
    while (r + 1 < v.size() && v[r] > half) ++r;
    const double xl = grid[l] + (half - v[l]) / (v[l + 1] - v[l]) * grid.step;
    const double xr = grid[r - 1] + (v[r - 1] - half) / (v[r - 1] - v[r]) * grid.step;
    return xr - xl;
}

}  // namespace

TEST_CASE("bare emitter spectrum is the lifetime-limited Lorentzian") {
    const auto c = bare_config();
    const double g2 = 0.5 * c.gamma1_per_ps();
    const double fwhm_meV = units::angular_to_energy(2.0 * g2);
    const auto grid = UniformGrid::spanning(-10.0 * fwhm_meV, 10.0 * fwhm_meV, fwhm_meV / 40.0);

    const auto point = emission_spectrum(c, grid, {SpectrumSampling::point});
    for (std::size_t k = 0; k < grid.size; ++k) {
        const double w = units::energy_to_angular(grid[k]);
        CHECK(point.s_zpl_lv[k] == doctest::Approx(g2 / (g2 * g2 + w * w)).epsilon(1e-9));
        CHECK(point.s_sb[k] == 0.0);
    }
    CHECK(half_max_width(grid, point.s_total) == doctest::Approx(fwhm_meV).epsilon(1e-3));
    CHECK(fwhm_meV_to_MHz(half_max_width(grid, point.s_total)) == doctest::Approx(36.76).epsilon(0.01));

    const auto cells = emission_spectrum(c, grid);
    const double h = units::energy_to_angular(grid.step);
    for (std::size_t k = 0; k < grid.size; k += 7) {
        const double w = units::energy_to_angular(grid[k]);
        const double exact = (std::atan((w + 0.5 * h) / g2) - std::atan((w - 0.5 * h) / g2)) / h;
        CHECK(cells.s_zpl_lv[k] == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("decoupled bulk bath leaves no sideband") {
    auto c = bare_config();
    c.modes = {{21.55, 6.98}};
    c.lv_bath.scale = 0.008;
    const auto r = emission_spectrum(c, UniformGrid::spanning(-60.0, 20.0, 0.02));
    for (double v : r.s_sb) CHECK(v == 0.0);
    CHECK(sum(r.s_zpl_lv) == sum(r.s_total));
    CHECK(r.dwf == 1.0);
}

TEST_CASE("vibrational lines sit on the red side") {
    auto c = bare_config();
    c.temperature_K = 0.0;
    c.modes = {{21.55, 6.98}};
    c.lv_bath.scale = 0.008;
    const auto grid = UniformGrid::spanning(-40.0, 40.0, 0.02);
    const auto r = emission_spectrum(c, grid);
    const auto peaks = find_peaks(grid, r.s_total, 1e-3);
    REQUIRE(peaks.size() == 2);
    CHECK(std::abs(peaks[0].detuning_meV + 21.55) <= 0.02);
    CHECK(std::abs(peaks[1].detuning_meV) <= 0.02);
}

TEST_CASE("line weights match Franck-Condon sums of the truncated mode") {
    auto c = bare_config();
    c.temperature_K = 100.0;
    c.modes = {{20.0, 6.0}};
    c.lv_bath.scale = 2e-4;
    c.lv_bath.zeta_meV = 10.0;
    const auto grid = UniformGrid::spanning(-400.0, 400.0, 0.02);
    const auto r = emission_spectrum(c, grid);

    // Weights |⟨k|exp(r(a†−a))|m⟩|² from an eigendecomposition of the generator r(a†−a).
    Matrix gen = Matrix::Zero(2, 2);
    gen(1, 0) = 0.3;
    gen(0, 1) = -0.3;
    Eigen::ComplexEigenSolver<Matrix> es(gen);
    const Matrix b = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().inverse();
    const double n = 1.0 / std::expm1(20.0 / (0.08617333 * 100.0));
    const double p0 = (n + 1.0) / (2.0 * n + 1.0), p1 = n / (2.0 * n + 1.0);
    const double zpl = p0 * std::norm(b(0, 0)) + p1 * std::norm(b(1, 1));
    const double stokes = p0 * std::norm(b(1, 0));
    const double anti = p1 * std::norm(b(0, 1));
    const double total = sum(r.s_total);
    CHECK(sum_where(r, r.s_total, -10.0, 10.0) / total == doctest::Approx(zpl).epsilon(2e-3));
    CHECK(sum_where(r, r.s_total, -1e9, -10.0) / total == doctest::Approx(stokes).epsilon(2e-3));
    CHECK(sum_where(r, r.s_total, 10.0, 1e9) / total == doctest::Approx(anti).epsilon(5e-3));
    CHECK(stokes / zpl == doctest::Approx(p0 * std::pow(std::tan(0.3), 2) / (p0 + p1)).epsilon(1e-9));
}

TEST_CASE("sideband area is the Debye-Waller complement") {
    struct Case {
        double alpha, xi, t;
    };
    for (const auto& k : {Case{0.02, 1.5, 4.7}, Case{0.05, 1.0, 20.0}, Case{0.01, 2.5, 40.0}}) {
        auto c = bare_config();
        c.bulk_bath = {k.alpha, k.xi, 0.0, 1024};
        c.temperature_K = k.t;
        const auto r = emission_spectrum(c, UniformGrid::spanning(-60.0, 20.0, 0.02));
        CHECK(r.dwf == doctest::Approx(bath::debye_waller(k.t, c.bulk_params())));
        CHECK(std::abs(r.zpl_lv_area_fraction() - r.dwf) < 0.02);
        for (std::size_t i = 0; i < r.s_total.size(); ++i) {
            CHECK(r.s_total[i] == r.s_zpl_lv[i] + r.s_sb[i]);
        }
        const double floor = -1e-9 * *std::max_element(r.s_total.begin(), r.s_total.end());
        CHECK(*std::min_element(r.s_sb.begin(), r.s_sb.end()) >= floor);
    }
}

TEST_CASE("cold sideband has no anti-Stokes wing") {
    const auto c = phonon_config(0.72, 0.5);
    const auto r = emission_spectrum(c, UniformGrid::spanning(-60.0, 20.0, 0.02));
    const double total = sum(r.s_sb);
    CHECK(total > 0.0);
    CHECK(sum_where(r, r.s_sb, 1.0, 1e9) < 1e-3 * total);
}

TEST_CASE("heating grows the sideband and the zero-phonon width") {
    auto cold = phonon_config(0.72, 5.0);
    cold.dephasing = {bath::solve_mu_for_rate(1e-3, 31.0, units::energy_to_angular(3.0)), 3.0};
    auto hot = cold;
    hot.temperature_K = 40.0;
    const auto wide = UniformGrid::spanning(-60.0, 20.0, 0.02);
    const auto rc = emission_spectrum(cold, wide), rh = emission_spectrum(hot, wide);
    CHECK(sum(rh.s_sb) / sum(rh.s_total) > sum(rc.s_sb) / sum(rc.s_total));

    const double w_hot = units::angular_to_energy(2.0 * gamma2(40.0, hot));
    const double w_cold = units::angular_to_energy(2.0 * gamma2(5.0, cold));
    const auto fine = UniformGrid::spanning(-5.0 * w_hot, 5.0 * w_hot, w_cold / 20.0);
    const auto pc = emission_spectrum(cold, fine, {SpectrumSampling::point});
    const auto ph = emission_spectrum(hot, fine, {SpectrumSampling::point});
    const double fc = half_max_width(fine, pc.s_total), fh = half_max_width(fine, ph.s_total);
    CHECK(fh > fc);
    CHECK(fc == doctest::Approx(w_cold).epsilon(0.01));
    CHECK(fh == doctest::Approx(w_hot).epsilon(0.01));
}

TEST_CASE("spectrum is deterministic across thread counts") {
    auto c = phonon_config(0.72, 4.7);
    c.modes = {{21.55, 6.98}, {28.60, 6.45}};
    c.lv_bath.scale = 0.008;
    const auto grid = UniformGrid::spanning(-60.0, 20.0, 0.05);
    const auto a = emission_spectrum(c, grid, {SpectrumSampling::cell_average, 1});
    const auto b = emission_spectrum(c, grid, {SpectrumSampling::cell_average, 3});
    const auto again = emission_spectrum(c, grid, {SpectrumSampling::cell_average, 1});
    CHECK(a.s_total == b.s_total);
    CHECK(a.s_total == again.s_total);
    CHECK(a.metadata == b.metadata);
}

TEST_CASE("sideband window failure is reported") {
    const auto c = phonon_config(0.72, 0.0);
    SpectrumOptions opt;
    opt.max_window_ps = 5.0;
    CHECK_THROWS_AS(emission_spectrum(c, UniformGrid::spanning(-5.0, 5.0, 0.1), opt), NumericalError);
}

TEST_CASE("emission correlator factorizes over modes at dim 32") {
    auto c = bare_config();
    c.temperature_K = 40.0;
    c.modes = {{21.55, 6.98}, {28.60, 6.45}, {31.10, 5.73}, {36.31, 9.30}};
    c.lv_bath.scale = 0.008;
    c.dephasing = {bath::solve_mu_for_rate(1e-3, 31.0, units::energy_to_angular(3.0)), 3.0};
    const auto m = model::assemble_undriven(c);
    const auto chi = quantum::time_integrated_source(m.liouvillian, m.emission_initial_state(model::InitialModeState::thermal), m.sigma_a);
    const UniformGrid tau{0.0, 0.25, 81};
    const auto g = quantum::regression_correlator(m.liouvillian, m.sigma_a.adjoint(), chi, tau);

    // Per-mode 4×4 superoperators from the matrix-form master equation.
    std::vector<Matrix> supers, seeds, lefts;
    for (std::size_t i = 0; i < c.modes.size(); ++i) {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 1) = 1.0;
        oracle::MatrixLindblad o{units::energy_to_angular(c.modes[i].delta_meV) * (a.adjoint() * a), {}};
        o.jumps.emplace_back(a.adjoint(), m.rates.gamma_plus[i]);
        o.jumps.emplace_back(a, m.rates.gamma_minus[i]);
        supers.push_back(o.superoperator(2));
        const double r = c.modes[i].displacement_ratio();
        Matrix b(2, 2);
        b << std::cos(r), -std::sin(r), std::sin(r), std::cos(r);
        const double n = m.mode_occupations[i];
        Matrix th = Matrix::Zero(2, 2);
        th(0, 0) = (n + 1.0) / (2.0 * n + 1.0);
        th(1, 1) = n / (2.0 * n + 1.0);
        const Matrix s = b * th;
        seeds.push_back(Eigen::Map<const Eigen::VectorXcd>(s.data(), 4));
        const Matrix bt = b.adjoint().transpose();
        lefts.push_back(Eigen::Map<const Eigen::VectorXcd>(bt.data(), 4));
    }
    const double decay = 0.5 * m.rates.gamma1 + m.rates.gamma_pd;
    for (std::size_t k = 0; k < tau.size; ++k) {
        Complex expect = std::exp(-decay * tau[k]) / m.rates.gamma1;
        for (std::size_t i = 0; i < supers.size(); ++i)
            expect *= (lefts[i].transpose() * oracle::series_expm(supers[i] * tau[k]) * seeds[i])(0, 0);
        CHECK(std::abs(g.values[k] - expect) < 1e-8 * std::abs(g.values[0]));
    }
}

TEST_CASE("resonance fluorescence of the bare emitter") {
    auto c = bare_config();
    c.drive = model::DriveSpec{0.0016, 0.0, true};
    const auto tau = UniformGrid::spanning(0.0, 20.0, 0.02);
    const auto trace = g2_resonant(c, tau);
    const double rabi = units::energy_to_angular(0.0016), gamma = c.gamma1_per_ps();
    double worst = 0.0;
    for (std::size_t k = 0; k < tau.size; ++k)
        worst = std::max(worst, std::abs(trace.values[k] - oracle::resonance_fluorescence_g2(units::ns_to_ps(tau[k]), rabi, gamma)));
    CHECK(worst < 1e-4);
    CHECK(std::abs(trace.values[0]) < 1e-6);
    CHECK(std::abs(trace.values.back() - 1.0) < 0.01);

    std::vector<double> osc(trace.values.size());
    for (std::size_t k = 0; k < osc.size(); ++k) osc[k] = trace.values[k] - 1.0;
    const double step_ps = units::ns_to_ps(tau.step);
    CHECK(oracle::dominant_frequency(osc, step_ps, 0.3 * rabi, 3.0 * rabi) == doctest::Approx(rabi).epsilon(0.02));
}

TEST_CASE("phonons renormalize the observed Rabi frequency") {
    auto c = phonon_config(0.72, 4.7);
    c.modes = {{21.55, 6.98}};
    c.lv_bath.scale = 0.008;
    c.drive = model::DriveSpec{0.0016, 0.0, true};
    const auto tau = UniformGrid::spanning(0.0, 30.0, 0.02);
    const auto trace = g2_resonant(c, tau);
    std::vector<double> osc(trace.values.size());
    for (std::size_t k = 0; k < osc.size(); ++k) osc[k] = trace.values[k] - 1.0;
    const double omega_r = units::energy_to_angular(model::renormalized_rabi(c));
    CHECK(omega_r == doctest::Approx(units::energy_to_angular(0.0016) * std::sqrt(0.72) * std::cos(6.98 / 21.55)).epsilon(1e-9));
    CHECK(oracle::dominant_frequency(osc, units::ns_to_ps(tau.step), 0.3 * omega_r, 3.0 * omega_r) ==
          doctest::Approx(omega_r).epsilon(0.05));
    CHECK(std::abs(trace.values[0]) < 1e-6);
    CHECK(std::abs(trace.values.back() - 1.0) < 0.01);
}

TEST_CASE("g2 preconditions") {
    auto c = bare_config();
    CHECK_THROWS_AS(g2_resonant(c, UniformGrid::spanning(0.0, 1.0, 0.1)), InvalidArgument);
    c.drive = model::DriveSpec{0.0016, 0.01, true};
    CHECK_THROWS_AS(g2_resonant(c, UniformGrid::spanning(0.0, 1.0, 0.1)), InvalidArgument);
}

TEST_CASE("jitter convolution") {
    const UniformGrid tau{-20.0, 0.01, 4001};
    CorrelationTrace dip{tau, std::vector<double>(tau.size), true};
    for (std::size_t k = 0; k < tau.size; ++k) dip.values[k] = 1.0 - std::exp(-std::abs(tau[k]) / 0.05);
    CHECK(convolve_jitter(dip, 0.0).values == dip.values);

    const auto smooth = convolve_jitter(dip, 300.0);
    CHECK(smooth.values[2000] > 0.05);
    CHECK(smooth.values.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(smooth.values.back() == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> periodic(1000);
    for (std::size_t k = 0; k < periodic.size(); ++k) periodic[k] = 1.0 + 0.4 * std::sin(2.0 * std::numbers::pi * 3.0 * k / 1000.0) + 0.1 * std::cos(0.01 * k * k);
    const auto conv = gaussian_convolve(periodic, 0.01, 0.3, Padding::periodic);
    CHECK(std::abs(sum(conv) - sum(periodic)) / periodic.size() < 1e-10);
    const auto refl = gaussian_convolve(periodic, 0.01, 0.3, Padding::reflect);
    CHECK(refl.size() == periodic.size());

    CHECK_THROWS_AS(gaussian_convolve(periodic, 0.01, 6.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_convolve(periodic, 0.01, -1.0), InvalidArgument);

    const auto sym = symmetrize({UniformGrid{0.0, 0.5, 3}, {0.0, 0.5, 1.0}, true});
    CHECK(sym.tau_ns.start == -1.0);
    CHECK(sym.values == std::vector<double>{1.0, 0.5, 0.0, 0.5, 1.0});
}

TEST_CASE("linewidth formulas") {
    auto c = bare_config();
    CHECK(gamma2(4.7, c) == 0.5 * c.gamma1_per_ps());
    CHECK(power_broadened_linewidth(gamma2(4.7, c), 0.0) == doctest::Approx(36.76).epsilon(1e-3));
    CHECK(power_broadened_linewidth(1e-4, 3.0) == doctest::Approx(2.0 * power_broadened_linewidth(1e-4, 0.0)).epsilon(1e-15));
    const double w0 = power_broadened_linewidth(1e-4, 0.0);
    for (double s : {0.5, 1.0, 2.0, 7.0}) {
        const double w = power_broadened_linewidth(1e-4, s);
        CHECK(w * w == doctest::Approx(w0 * w0 * (1.0 + s)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(power_broadened_linewidth(1e-4, -0.1), InvalidArgument);

    c.dephasing = {bath::solve_mu_for_rate(1e-3, 31.0, units::energy_to_angular(3.0)), 3.0};
    double last = 0.0;
    for (double t : {4.7, 10.0, 20.0, 31.0, 40.0}) {
        const double g = gamma2(t, c);
        CHECK(g > last);
        last = g;
    }
    CHECK(gamma2(4.7, c) == doctest::Approx(0.5 * c.gamma1_per_ps()).epsilon(0.01));
}

TEST_CASE("non-resonant g2 closed form") {
    CHECK(g2_nonresonant_model(0.0, 0.9, 0.5, 0.231) == doctest::Approx(0.1));
    CHECK(g2_nonresonant_model(1e4, 0.9, 0.5, 0.231) == doctest::Approx(1.0));
    CHECK(g2_nonresonant_model(1.0 / 0.231, 1.0, 0.0, 0.231) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(g2_nonresonant_model(-2.0, 0.7, 0.2, 0.231) == g2_nonresonant_model(2.0, 0.7, 0.2, 0.231));
}

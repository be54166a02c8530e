#include <doctest.h>

#include <cmath>
#include <random>

#include "molspec/core/errors.hpp"
#include "molspec/quantum/correlator_transform.hpp"
#include "molspec/quantum/dynamics.hpp"
#include "oracles.hpp"

#include <unsupported/Eigen/KroneckerProduct>

using namespace molspec;
using namespace molspec::quantum;

namespace {

struct Emitter {
    OperatorMatrix hamiltonian;
    std::vector<LindbladTerm> terms;
    OperatorMatrix dressed;
    DensityOperator excited;
};

/// TLS + modes with damping, dephasing and dressed decay, assembled by hand from operators.
Emitter make_emitter(const std::vector<double>& delta, const std::vector<double>& ratio, double kappa, double occupation,
                     double gamma1, double dephasing) {
    const auto space = build_space(static_cast<int>(delta.size()));
    Emitter e{OperatorMatrix::zero(space), {}, embed_operator(space, OperatorKind::dressed_sigma(ratio)), OperatorMatrix::zero(space)};
    e.terms.push_back({e.dressed, gamma1});
    e.terms.push_back({embed_operator(space, OperatorKind::sigma_dag_sigma()), 2.0 * dephasing});
    Matrix mode_state = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const int m = static_cast<int>(i);
        e.hamiltonian += Complex(delta[i], 0.0) * embed_operator(space, OperatorKind::number(m));
        const auto a = embed_operator(space, OperatorKind::annihilation(m));
        e.terms.push_back({a.adjoint(), kappa * occupation});
        e.terms.push_back({a, kappa * (occupation + 1.0)});
        const Matrix th = truncated_thermal_state(occupation);
        mode_state = Eigen::kroneckerProduct(mode_state, th).eval();
    }
    Matrix ee = Matrix::Zero(2, 2);
    ee(1, 1) = 1.0;
    e.excited = {space, Eigen::kroneckerProduct(ee, mode_state).eval()};
    return e;
}

oracle::MatrixLindblad as_oracle(const OperatorMatrix& h, const std::vector<LindbladTerm>& terms) {
    oracle::MatrixLindblad o{h.data, {}};
    for (const auto& t : terms) o.jumps.emplace_back(t.op.data, t.rate);
    return o;
}

}  // namespace

TEST_CASE("composite space dimensions and ordering") {
    CHECK(build_space(0).dim() == 2);
    CHECK(build_space(2).dim() == 8);
    CHECK(build_space(4).dim() == 32);
    CHECK_THROWS_AS(build_space(13), InvalidArgument);
    CHECK_THROWS_AS(build_space(-1), InvalidArgument);

    const auto s = build_space(3);
    for (std::size_t k = 0; k < s.dim(); ++k) CHECK(s.index(s.label(k)) == k);
    const BasisLabel top{1, {0, 0, 0}};
    CHECK(s.index(top) == 8);  // TLS is the most significant factor
    const BasisLabel last_mode{0, {0, 0, 1}};
    CHECK(s.index(last_mode) == 1);
}

TEST_CASE("embedded operators") {
    const auto tls = build_space(0);
    const auto sigma = embed_operator(tls, OperatorKind::sigma());
    CHECK(sigma.data(0, 1) == Complex(1.0, 0.0));
    CHECK(sigma.data.cwiseAbs().sum() == doctest::Approx(1.0));

    const auto s = build_space(2);
    CHECK((embed_operator(s, OperatorKind::displacement(1, 0.0)).data - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);

    Matrix gen(2, 2);
    gen << 0.0, -0.3, 0.3, 0.0;
    const Matrix ref = oracle::series_expm(gen);
    CHECK((Matrix(truncated_displacement(0.3)) - ref).cwiseAbs().maxCoeff() < 1e-12);

    const auto b = embed_operator(s, OperatorKind::displacement(0, 0.3));
    CHECK((b.data.adjoint() * b.data - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);

    for (int m = 0; m < 2; ++m) {
        const auto a = embed_operator(s, OperatorKind::annihilation(m));
        CHECK((a.data * a.data).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.data * a.data.adjoint() + a.data.adjoint() * a.data - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
        const auto n = embed_operator(s, OperatorKind::number(m));
        CHECK(hermiticity_error(n.data) < 1e-12);
        CHECK((n.data - a.data.adjoint() * a.data).cwiseAbs().maxCoeff() == 0.0);
    }

    const auto dressed = embed_operator(s, OperatorKind::dressed_sigma({0.2, 0.1}));
    const Matrix expect = embed_operator(s, OperatorKind::sigma()).data * embed_operator(s, OperatorKind::displacement(0, 0.2)).data *
                          embed_operator(s, OperatorKind::displacement(1, 0.1)).data;
    CHECK((dressed.data - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((dressed.data * dressed.data).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(OperatorKind::from_name("bogus"), InvalidArgument);
    CHECK_THROWS_AS(embed_operator(s, OperatorKind::annihilation(2)), InvalidArgument);
    CHECK_THROWS_AS(embed_operator(s, OperatorKind::dressed_sigma({0.1})), InvalidArgument);
}

TEST_CASE("liouvillian construction") {
    const auto tls = build_space(0);
    const auto zero = build_liouvillian(OperatorMatrix::zero(tls), {});
    CHECK(zero.matrix().cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(7);
    const auto s = build_space(2);
    const OperatorMatrix h{s, oracle::random_hermitian(rng, 8, 1.0)};
    std::vector<LindbladTerm> terms;
    for (int k = 0; k < 3; ++k) terms.push_back({{s, oracle::random_matrix(rng, 8, 0.5)}, 0.3 + k});
    const auto l = build_liouvillian(h, terms);
    CHECK(trace_annihilation_error(l) < 1e-10);

    const auto o = as_oracle(h, terms);
    const Matrix x = oracle::random_matrix(rng, 8, 1.0);
    CHECK((l.apply(OperatorMatrix{s, x}).data - o.rhs(x)).cwiseAbs().maxCoeff() < 1e-12);

    std::vector<LindbladTerm> bad{{terms[0].op, -1.0}};
    CHECK_THROWS_AS(build_liouvillian(h, bad), InvalidArgument);
    std::vector<LindbladTerm> wrong{{embed_operator(tls, OperatorKind::sigma()), 1.0}};
    CHECK_THROWS_AS(build_liouvillian(h, wrong), InvalidArgument);
    CHECK_THROWS_AS(build_liouvillian(OperatorMatrix{s, oracle::random_matrix(rng, 8, 1.0)}, {}), InvalidArgument);
    CHECK_THROWS_AS(Liouvillian(build_space(6)), InvalidArgument);
}

TEST_CASE("bare two-level decay") {
    const auto tls = build_space(0);
    const double g1 = 0.7;
    std::vector<LindbladTerm> terms{{embed_operator(tls, OperatorKind::sigma()), g1}};
    const auto l = build_liouvillian(OperatorMatrix::zero(tls), terms);
    DensityOperator e = OperatorMatrix::zero(tls);
    e.data(1, 1) = 1.0;
    const std::vector<double> t{0.0, 0.1, 0.5, 1.0, 3.0, 10.0};
    const auto traj = evolve(l, e, t);
    CHECK((traj[0].data - e.data).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(traj[k].data(1, 1).real() - std::exp(-g1 * t[k])) < 1e-10);

    const auto ss = steady_state(l);
    CHECK(std::abs(ss.data(0, 0) - 1.0) < 1e-12);

    const auto chi = time_integrated_source(l, e, embed_operator(tls, OperatorKind::sigma()));
    CHECK(std::abs(chi.data(0, 1) - 1.0 / g1) < 1e-12);
    CHECK(std::abs((embed_operator(tls, OperatorKind::sigma()).adjoint() * chi).trace() - 1.0 / g1) < 1e-12);
    CHECK(time_integrated_source(l, e, OperatorMatrix::zero(tls)).data.cwiseAbs().maxCoeff() == 0.0);

    const UniformGrid grid{0.0, 0.25, 40};
    const auto f = regression_correlator(l, embed_operator(tls, OperatorKind::sigma()).adjoint(), chi, grid);
    CHECK(f.values[0] == (embed_operator(tls, OperatorKind::sigma()).adjoint().data * chi.data).trace());
    for (std::size_t k = 0; k < grid.size; ++k) CHECK(std::abs(f.values[k] - std::exp(-0.5 * g1 * grid[k]) / g1) < 1e-12);

    const std::vector<double> uneven{0.0, 0.1, 0.3};
    CHECK_THROWS_AS(regression_correlator(l, chi, chi, uneven), InvalidArgument);
    const std::vector<double> unsorted{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(evolve(l, e, unsorted), InvalidArgument);
}

TEST_CASE("random generators are trace preserving and completely positive") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = build_space(2);
        const OperatorMatrix h{s, oracle::random_hermitian(rng, 8, 2.0)};
        std::vector<LindbladTerm> terms;
        for (int k = 0; k < 4; ++k) terms.push_back({{s, oracle::random_matrix(rng, 8, 0.4)}, 0.1 * (k + 1)});
        const auto l = build_liouvillian(h, terms);
        CHECK(trace_annihilation_error(l) < 1e-10);
        const DensityOperator rho0{s, oracle::random_density(rng, 8)};
        const std::vector<double> t{0.0, 0.05, 0.2, 1.0, 4.0, 20.0};
        for (const auto& rho : evolve(l, rho0, t)) {
            const auto d = diagnose_density(rho.data);
            CHECK(d.trace_error < 1e-10);
            CHECK(d.hermiticity_error < 1e-10);
            CHECK(d.min_eigenvalue > -1e-8);
        }
        const auto o = as_oracle(h, terms);
        const auto traj = evolve(l, rho0, std::vector<double>{1.5});
        CHECK((traj[0].data - o.propagate(rho0.data, 1.5, 3000)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("evolution self-convergence at dim 32") {
    const auto e = make_emitter({33.0, 43.0, 47.0, 55.0}, {0.3, 0.2, 0.18, 0.25}, 0.4, 0.05, 0.05, 0.01);
    const auto l = build_liouvillian(e.hamiltonian, e.terms);
    std::vector<double> coarse, fine;
    for (int k = 0; k <= 20; ++k) coarse.push_back(0.4 * k);
    for (int k = 0; k <= 40; ++k) fine.push_back(0.2 * k);
    const auto a = evolve(l, e.excited, coarse);
    const auto b = evolve(l, e.excited, fine);
    double worst = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) worst = std::max(worst, (a[k].data - b[2 * k].data).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-8);
}

TEST_CASE("undriven steady state is ground electronic state with thermal modes") {
    const double n = 0.3, kappa = 0.5;
    const auto e = make_emitter({20.0, 31.0}, {0.3, 0.2}, kappa, n, 0.1, 0.02);
    const auto l = build_liouvillian(e.hamiltonian, e.terms);
    const auto ss = steady_state(l);
    CHECK((l.matrix() * vectorize(ss.data)).cwiseAbs().maxCoeff() < 1e-10);
    const double p0 = (n + 1.0) / (2.0 * n + 1.0), p1 = n / (2.0 * n + 1.0);
    const double expect[4] = {p0 * p0, p0 * p1, p1 * p0, p1 * p1};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(ss.data(k, k).real() - expect[k]) < 1e-10);
    CHECK(ss.data.block(4, 4, 4, 4).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(ss.data(1, 1).real() / ss.data(0, 0).real() - n / (n + 1.0)) < 1e-8);

    const auto cold = make_emitter({20.0, 31.0}, {0.3, 0.2}, kappa, 0.0, 0.1, 0.02);
    const auto ss0 = steady_state(build_liouvillian(cold.hamiltonian, cold.terms));
    CHECK(std::abs(ss0.data(0, 0) - 1.0) < 1e-12);

    CHECK_THROWS_AS(steady_state(build_liouvillian(OperatorMatrix::zero(build_space(1)), {})), NumericalError);
}

TEST_CASE("strongly driven two-level system saturates at one half") {
    const auto tls = build_space(0);
    const auto sigma = embed_operator(tls, OperatorKind::sigma());
    const double omega = 50.0, g1 = 1.0;
    const OperatorMatrix h = Complex(0.5 * omega, 0.0) * (sigma + sigma.adjoint());
    std::vector<LindbladTerm> terms{{sigma, g1}};
    const auto ss = steady_state(build_liouvillian(h, terms));
    CHECK(std::abs(ss.data(1, 1).real() - 0.5) < 1e-3);
    // Analytic resonance-fluorescence population s/(2(1+s)), s = 2Ω²/Γ².
    const double sat = 2.0 * omega * omega / (g1 * g1);
    CHECK(std::abs(ss.data(1, 1).real() - sat / (2.0 * (1.0 + sat))) < 1e-12);
}

TEST_CASE("time-integrated source matches direct quadrature at dim 8") {
    const auto e = make_emitter({5.0, 9.0}, {0.3, 0.25}, 0.6, 0.2, 1.0, 0.1);
    const auto l = build_liouvillian(e.hamiltonian, e.terms);
    const auto chi = time_integrated_source(l, e.excited, e.dressed);

    const auto o = as_oracle(e.hamiltonian, e.terms);
    const double h = 0.002, t_end = 45.0;
    const int steps = static_cast<int>(t_end / h);
    Matrix rho = e.excited.data;
    Matrix acc = Matrix::Zero(8, 8), prev = e.dressed.data * rho;
    for (int s = 0; s < steps; ++s) {
        rho = o.propagate(rho, h, 1);
        const Matrix cur = e.dressed.data * rho;
        acc += 0.5 * h * (prev + cur);
        prev = cur;
    }
    CHECK((chi.data - acc).cwiseAbs().maxCoeff() < 1e-6);

    DensityOperator mixed{e.excited.space, 0.5 * (e.excited.data + steady_state(l).data)};
    const auto tls_like = embed_operator(e.excited.space, OperatorKind::sigma_dag_sigma());
    CHECK_THROWS_AS(time_integrated_source(l, mixed, tls_like, DensityOperator{e.excited.space, e.excited.data}), InvalidArgument);
}

TEST_CASE("regression correlator matches double propagation at dim <= 8") {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        const int modes = trial % 3;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> delta, ratio;
        for (int m = 0; m < modes; ++m) {
            delta.push_back(5.0 + 20.0 * u(rng));
            ratio.push_back(0.4 * u(rng));
        }
        const auto e = make_emitter(delta, ratio, 0.2 + u(rng), 0.5 * u(rng), 0.2 + u(rng), 0.2 * u(rng));
        const auto l = build_liouvillian(e.hamiltonian, e.terms);
        const auto o = as_oracle(e.hamiltonian, e.terms);
        const double t0 = 0.5 + u(rng);
        const Matrix rho_t = o.propagate(e.excited.data, t0, 4000);
        const OperatorMatrix seed{e.excited.space, e.dressed.data * rho_t};
        const UniformGrid grid{0.0, 0.25, 13};
        const auto f = regression_correlator(l, e.dressed.adjoint(), seed, grid);
        Matrix x = seed.data;
        for (std::size_t k = 0; k < grid.size; ++k) {
            if (k > 0) x = o.propagate(x, grid.step, 1000);
            worst = std::max(worst, std::abs(f.values[k] - (e.dressed.adjoint().data * x).trace()));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("correlator transform is the one-sided Laplace transform") {
    const auto e = make_emitter({12.0, 19.0}, {0.3, 0.2}, 0.5, 0.1, 0.3, 0.05);
    const auto l = build_liouvillian(e.hamiltonian, e.terms);
    const auto chi = time_integrated_source(l, e.excited, e.dressed);
    CorrelatorTransform tr(l, e.dressed.adjoint(), chi);
    CHECK(tr.uses_pole_expansion());

    // Simpson half-Fourier of the sampled correlator at a few frequencies.
    const UniformGrid tau{0.0, 0.002, 60001};
    const auto f = regression_correlator(l, e.dressed.adjoint(), chi, tau);
    for (double w : {-19.0, -12.0, -3.0, 0.0, 2.0}) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < tau.size; ++k) {
            const double wt = (k == 0 || k + 1 == tau.size) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            acc += wt * tau.step / 3.0 * f.values[k] * std::exp(Complex(0.0, -w * tau[k]));
        }
        CHECK(std::abs(acc - tr.value(w)) < 1e-6 * std::abs(tr.value(w)) + 1e-8);
    }

    // Cell integrals integrate the point values; the full real line carries π·Re f(0).
    const double lo = -3.1, hi = -2.2;
    const double direct = oracle::composite_gauss([&](double w) { return tr.value(w).real(); }, lo, hi, 400);
    CHECK(std::abs(tr.integral(lo, hi).real() - direct) < 1e-10);
    CHECK(std::abs(tr.integral(-1e7, 1e7).real() - M_PI * tr.initial_value().real()) < 1e-5 * std::abs(tr.initial_value()));
}

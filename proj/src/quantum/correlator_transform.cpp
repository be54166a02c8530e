#include "molspec/quantum/correlator_transform.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "molspec/core/errors.hpp"
#include "molspec/core/parallel.hpp"

namespace molspec::quantum {

namespace {

constexpr double kMaxAmplification = 1e5;
constexpr double kCheckTolerance = 1e-9;

/// log(1 + w) without cancellation for small |w|.
Complex log1p_complex(Complex w) {
    const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
    const double im = std::atan2(w.imag(), 1.0 + w.real());
    return {re, im};
}

}  // namespace

CorrelatorTransform::CorrelatorTransform(const Liouvillian& l, const OperatorMatrix& a_left, const OperatorMatrix& seed) {
    if (!(a_left.space == l.space()) || !(seed.space == l.space())) throw InvalidArgument("operators and Liouvillian live on different spaces");
    initial_ = (a_left.data * seed.data).trace();
    const Vector s_full = vectorize(seed.data);
    const ReducedGenerator gen(l, s_full);
    const auto m = static_cast<Eigen::Index>(gen.subspace().size());
    if (m == 0) {
        pole_expansion_ = true;
        return;
    }
    Eigen::ComplexSchur<SuperMatrix> schur(gen.matrix());
    if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition of the reduced generator failed");
    const SuperMatrix& u = schur.matrixU();
    schur_t_ = schur.matrixT();
    left_ = gen.subspace().restrict_row(left_trace_row(a_left.data)) * u;
    right_ = u.adjoint() * gen.subspace().restrict_vector(s_full);
    poles_ = schur_t_.diagonal();
    for (Eigen::Index k = 0; k < m; ++k)
        if (!(poles_(k).real() < 0.0)) throw NumericalError("correlator does not decay: generator has a non-damped mode on the seed subspace");

    // Eigenvectors of T by back-substitution; V is unit upper triangular.
    const double tnorm = schur_t_.cwiseAbs().maxCoeff();
    const double floor = std::numeric_limits<double>::epsilon() * std::max(tnorm, 1e-300);
    SuperMatrix v = SuperMatrix::Identity(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index i = k - 1; i >= 0; --i) {
            Complex acc = 0.0;
            for (Eigen::Index j = i + 1; j <= k; ++j) acc += schur_t_(i, j) * v(j, k);
            Complex d = schur_t_(i, i) - poles_(k);
            if (std::abs(d) < floor) d = floor;
            v(i, k) = -acc / d;
        }
    }
    const Eigen::RowVectorXcd wv = left_ * v;
    const Vector vinv_z = v.triangularView<Eigen::UnitUpper>().solve(right_);
    residues_ = wv.transpose().cwiseProduct(vinv_z);

    const double scale = std::max(std::abs(initial_), residues_.cwiseAbs().maxCoeff() * 1e-12);
    pole_expansion_ = residues_.allFinite() && residues_.cwiseAbs().sum() <= kMaxAmplification * std::max(scale, 1e-300);
    if (pole_expansion_) {
        // Verify against the resolvent near the narrowest poles and across the band.
        std::vector<double> checks{0.0};
        for (Eigen::Index k = 0; k < m; ++k) checks.push_back(-poles_(k).imag());
        std::sort(checks.begin(), checks.end());
        const std::size_t stride = std::max<std::size_t>(1, checks.size() / 24);
        double worst = 0.0, ref = 0.0;
        for (std::size_t k = 0; k < checks.size(); k += stride) {
            for (double offset : {0.0, 0.37}) {
                const double w = checks[k] + offset;
                const Complex a = resolvent(w), b = pole_sum(w);
                worst = std::max(worst, std::abs(a - b));
                ref = std::max(ref, std::abs(a));
            }
        }
        pole_expansion_ = worst <= kCheckTolerance * ref;
    }
}

Complex CorrelatorTransform::resolvent(double omega) const {
    // Solve (iω − T) y = U* s by back-substitution, return (lU)·y.
    const Eigen::Index m = right_.size();
    Vector y(m);
    const Complex iw(0.0, omega);
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        Complex acc = right_(i);
        const Complex* row = schur_t_.data() + i * m;
        for (Eigen::Index j = i + 1; j < m; ++j) acc += row[j] * y(j);
        y(i) = acc / (iw - row[i]);
    }
    return left_ * y;
}

Complex CorrelatorTransform::pole_sum(double omega) const {
    Complex acc = 0.0;
    const Complex iw(0.0, omega);
    for (Eigen::Index k = 0; k < poles_.size(); ++k) acc += residues_(k) / (iw - poles_(k));
    return acc;
}

Complex CorrelatorTransform::value(double omega) const {
    if (poles_.size() == 0) return 0.0;
    return pole_expansion_ ? pole_sum(omega) : resolvent(omega);
}

Complex CorrelatorTransform::pole_integral(double lo, double hi) const {
    // ∫ dω / (iω − λ) = −i log((i·hi − λ)/(i·lo − λ)); Re(iω − λ) > 0 keeps the principal branch valid.
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < poles_.size(); ++k) {
        const Complex za = Complex(0.0, lo) - poles_(k);
        const Complex w = Complex(0.0, hi - lo) / za;
        const Complex lg = std::abs(w) < 0.5 ? log1p_complex(w) : std::log(Complex(0.0, hi) - poles_(k)) - std::log(za);
        acc += residues_(k) * Complex(0.0, -1.0) * lg;
    }
    return acc;
}

Complex CorrelatorTransform::quadrature_integral(double lo, double hi) const {
    // Breakpoints at poles narrower than the interval keep the adaptive rule from missing them.
    std::vector<double> cuts{lo, hi};
    const double width = hi - lo;
    for (Eigen::Index k = 0; k < poles_.size(); ++k) {
        const double centre = -poles_(k).imag(), half = -poles_(k).real();
        if (half >= width) continue;
        for (double f = 1.0; f >= 1e-12 && f * half > 1e-14 * width; f *= 0.1) {
            for (double c : {centre - f * half * 10.0, centre + f * half * 10.0})
                if (c > lo && c < hi) cuts.push_back(c);
        }
        if (centre > lo && centre < hi) cuts.push_back(centre);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Complex acc = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double re = GK::integrate([this](double w) { return resolvent(w).real(); }, cuts[k], cuts[k + 1], 20, 1e-12);
        const double im = GK::integrate([this](double w) { return resolvent(w).imag(); }, cuts[k], cuts[k + 1], 20, 1e-12);
        acc += Complex(re, im);
    }
    return acc;
}

Complex CorrelatorTransform::integral(double omega_lo, double omega_hi) const {
    if (!(omega_hi >= omega_lo)) throw InvalidArgument("integration interval must be ordered");
    if (poles_.size() == 0 || omega_hi == omega_lo) return 0.0;
    return pole_expansion_ ? pole_integral(omega_lo, omega_hi) : quadrature_integral(omega_lo, omega_hi);
}

std::vector<double> CorrelatorTransform::real_cell_averages(const UniformGrid& omega_grid, int threads) const {
    std::vector<double> out(omega_grid.size, 0.0);
    const double h = omega_grid.step;
    if (!(h > 0.0)) throw InvalidArgument("cell averages need a positive grid step");
    parallel_for(omega_grid.size, threads, [&](std::size_t k) {
        const double c = omega_grid[k];
        out[k] = integral(c - 0.5 * h, c + 0.5 * h).real() / h;
    });
    return out;
}

std::vector<double> CorrelatorTransform::real_point_values(const UniformGrid& omega_grid, int threads) const {
    std::vector<double> out(omega_grid.size, 0.0);
    parallel_for(omega_grid.size, threads, [&](std::size_t k) { out[k] = value(omega_grid[k]).real(); });
    return out;
}

}  // namespace molspec::quantum

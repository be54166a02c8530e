#include "molspec/quantum/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "molspec/core/errors.hpp"

namespace molspec::quantum {

namespace {

constexpr double kSingularRcond = 1e-14;
constexpr double kSteadyResidual = 1e-10;
constexpr double kSourcePrecondition = 1e-10;

bool all_finite(const Eigen::Ref<const SuperMatrix>& m) { return m.allFinite(); }

bool is_diagonal_coordinate(Eigen::Index k, Eigen::Index dim) { return k % dim == k / dim; }

Vector solve_with_trace_row(SuperMatrix m, Vector rhs, const Subspace& sub, Eigen::Index dim, Complex trace_value,
                            const char* what) {
    // One diagonal equation is implied by the rest because t·L = 0 on an invariant subspace;
    // replacing it by the trace row fixes the null direction.
    const auto& idx = sub.indices();
    std::optional<Eigen::Index> replaced;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (is_diagonal_coordinate(idx[k], dim)) {
            const auto local = static_cast<Eigen::Index>(k);
            if (!replaced) {
                replaced = local;
                m.row(local).setZero();
            }
            m(*replaced, local) = 1.0;
        }
    }
    if (replaced) rhs(*replaced) = trace_value;
    Eigen::PartialPivLU<SuperMatrix> lu(m);
    if (!(lu.rcond() > kSingularRcond)) throw NumericalError(std::string(what) + ": generator block is singular");
    Vector x = lu.solve(rhs);
    if (!x.allFinite()) throw NumericalError(std::string(what) + ": linear solve produced non-finite values");
    return x;
}

}  // namespace

Subspace::Subspace(std::vector<Eigen::Index> indices, Eigen::Index full_size)
    : indices_(std::move(indices)), full_size_(full_size) {
    std::sort(indices_.begin(), indices_.end());
}

Subspace Subspace::reachable(const SuperMatrix& m, const Eigen::Ref<const Vector>& seed) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n || seed.size() != n) throw InvalidArgument("seed length does not match the generator");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<Eigen::Index> frontier;
    for (Eigen::Index k = 0; k < n; ++k)
        if (seed(k) != Complex(0.0, 0.0)) {
            seen[static_cast<std::size_t>(k)] = 1;
            frontier.push_back(k);
        }
    while (!frontier.empty()) {
        const Eigen::Index j = frontier.front();
        frontier.pop_front();
        const Complex* col = m.data() + j * n;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!seen[static_cast<std::size_t>(i)] && col[i] != Complex(0.0, 0.0)) {
                seen[static_cast<std::size_t>(i)] = 1;
                frontier.push_back(i);
            }
    }
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < n; ++k)
        if (seen[static_cast<std::size_t>(k)]) idx.push_back(k);
    return {std::move(idx), n};
}

std::vector<Subspace> Subspace::components(const SuperMatrix& m) {
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex* col = m.data() + j * n;
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j && col[i] != Complex(0.0, 0.0)) {
                const Eigen::Index a = find(i), b = find(j);
                if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
    }
    std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) groups[static_cast<std::size_t>(find(k))].push_back(k);
    std::vector<Subspace> out;
    for (auto& g : groups)
        if (!g.empty()) out.emplace_back(std::move(g), n);
    return out;
}

SuperMatrix Subspace::restrict_matrix(const SuperMatrix& m) const {
    const auto k = static_cast<Eigen::Index>(indices_.size());
    SuperMatrix out(k, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < k; ++r) out(r, c) = m(indices_[static_cast<std::size_t>(r)], indices_[static_cast<std::size_t>(c)]);
    return out;
}

Vector Subspace::restrict_vector(const Eigen::Ref<const Vector>& v) const {
    Vector out(static_cast<Eigen::Index>(indices_.size()));
    for (std::size_t k = 0; k < indices_.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(indices_[k]);
    return out;
}

Eigen::RowVectorXcd Subspace::restrict_row(const Eigen::RowVectorXcd& row) const {
    Eigen::RowVectorXcd out(static_cast<Eigen::Index>(indices_.size()));
    for (std::size_t k = 0; k < indices_.size(); ++k) out(static_cast<Eigen::Index>(k)) = row(indices_[k]);
    return out;
}

Vector Subspace::lift(const Eigen::Ref<const Vector>& v) const {
    if (v.size() != static_cast<Eigen::Index>(indices_.size())) throw InvalidArgument("subspace vector length mismatch");
    Vector out = Vector::Zero(full_size_);
    for (std::size_t k = 0; k < indices_.size(); ++k) out(indices_[k]) = v(static_cast<Eigen::Index>(k));
    return out;
}

ReducedGenerator::ReducedGenerator(const Liouvillian& l, const Eigen::Ref<const Vector>& seed)
    : subspace_(Subspace::reachable(l.matrix(), seed)), matrix_(subspace_.restrict_matrix(l.matrix())) {}

SuperMatrix ReducedGenerator::propagator(double t) const {
    if (!std::isfinite(t)) throw InvalidArgument("propagation time must be finite");
    if (matrix_.size() == 0) return matrix_;
    SuperMatrix p = (matrix_ * t).exp();
    if (!all_finite(p)) throw NumericalError("matrix exponential produced non-finite entries");
    return p;
}

std::vector<DensityOperator> evolve(const Liouvillian& l, const DensityOperator& rho0, std::span<const double> t_grid) {
    if (!(rho0.space == l.space())) throw InvalidArgument("initial state and Liouvillian live on different spaces");
    if (!rho0.data.allFinite()) throw InvalidArgument("initial state has non-finite entries");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] >= 0.0) || !std::isfinite(t_grid[k])) throw InvalidArgument("time grid must be finite and non-negative");
        if (k > 0 && !(t_grid[k] >= t_grid[k - 1])) throw InvalidArgument("time grid must be sorted ascending");
    }
    const Vector v0 = vectorize(rho0.data);
    const ReducedGenerator gen(l, v0);
    Vector v = gen.subspace().restrict_vector(v0);

    std::vector<DensityOperator> out;
    out.reserve(t_grid.size());
    double t_prev = 0.0;
    double cached_step = -1.0;
    SuperMatrix step_prop;
    for (double t : t_grid) {
        const double h = t - t_prev;
        if (h > 0.0) {
            if (std::abs(h - cached_step) > 1e-12 * std::max(h, cached_step)) {
                step_prop = gen.propagator(h);
                cached_step = h;
            }
            v = step_prop * v;
            t_prev = t;
        }
        if (!v.allFinite()) throw NumericalError("time evolution produced non-finite entries");
        out.emplace_back(l.space(), t == 0.0 ? rho0.data : unvectorize(gen.subspace().lift(v), l.dim()));
    }
    return out;
}

DensityOperator steady_state(const Liouvillian& l) {
    const auto dim = static_cast<Eigen::Index>(l.dim());
    const auto comps = Subspace::components(l.matrix());
    std::optional<Vector> rho;
    for (const auto& comp : comps) {
        const bool has_diag = std::any_of(comp.indices().begin(), comp.indices().end(),
                                          [&](Eigen::Index k) { return is_diagonal_coordinate(k, dim); });
        const SuperMatrix block = comp.restrict_matrix(l.matrix());
        if (!has_diag) {
            Eigen::PartialPivLU<SuperMatrix> lu(block);
            if (!(lu.rcond() > kSingularRcond))
                throw NumericalError("steady state is not unique: a traceless block of the generator is singular");
            continue;
        }
        if (rho) throw NumericalError("steady state is not unique: the generator has disconnected population blocks");
        const Vector rhs = Vector::Zero(static_cast<Eigen::Index>(comp.size()));
        rho = comp.lift(solve_with_trace_row(block, rhs, comp, dim, 1.0, "steady state"));
    }
    if (!rho) throw NumericalError("steady state: generator has no population coordinates");
    const double residual = (l.matrix() * *rho).cwiseAbs().maxCoeff();
    if (!(residual < kSteadyResidual)) throw NumericalError("steady state residual " + std::to_string(residual) + " exceeds tolerance");
    Matrix m = unvectorize(*rho, l.dim());
    m = 0.5 * (m + m.adjoint());
    m /= m.trace();
    return {l.space(), m};
}

OperatorMatrix time_integrated_source(const Liouvillian& l, const DensityOperator& rho0, const OperatorMatrix& a) {
    return time_integrated_source(l, rho0, a, steady_state(l));
}

OperatorMatrix time_integrated_source(const Liouvillian& l, const DensityOperator& rho0, const OperatorMatrix& a,
                                      const DensityOperator& rho_ss) {
    if (!(rho0.space == l.space()) || !(a.space == l.space()) || !(rho_ss.space == l.space()))
        throw InvalidArgument("operators and Liouvillian live on different spaces");
    const double leak = (a.data * rho_ss.data).cwiseAbs().maxCoeff();
    if (leak > kSourcePrecondition)
        throw InvalidArgument("time-integrated source diverges: A·ρ_ss = " + std::to_string(leak) + " is not zero");
    if (a.data.isZero(0.0)) return OperatorMatrix::zero(l.space());

    const Vector b = vectorize(rho0.data - rho_ss.data);
    const Subspace sub = Subspace::reachable(l.matrix(), b);
    if (sub.size() == 0) return OperatorMatrix::zero(l.space());
    const Vector x = solve_with_trace_row(sub.restrict_matrix(l.matrix()), sub.restrict_vector(b), sub,
                                          static_cast<Eigen::Index>(l.dim()), 0.0, "time-integrated source");
    const Matrix xm = unvectorize(sub.lift(x), l.dim());
    return {l.space(), -(a.data * xm)};
}

ComplexSamples regression_correlator(const Liouvillian& l, const OperatorMatrix& a_left, const OperatorMatrix& seed,
                                     const UniformGrid& tau_grid) {
    if (!(a_left.space == l.space()) || !(seed.space == l.space())) throw InvalidArgument("operators and Liouvillian live on different spaces");
    if (tau_grid.start != 0.0) throw InvalidArgument("regression grid must start at τ = 0");
    if (tau_grid.size > 1 && !(tau_grid.step > 0.0)) throw InvalidArgument("regression grid must be ascending");

    ComplexSamples out{tau_grid, std::vector<Complex>(tau_grid.size)};
    if (tau_grid.size == 0) return out;
    const Vector s_full = vectorize(seed.data);
    const ReducedGenerator gen(l, s_full);
    const Eigen::RowVectorXcd left = gen.subspace().restrict_row(left_trace_row(a_left.data));
    Vector v = gen.subspace().restrict_vector(s_full);
    out.values[0] = (a_left.data * seed.data).trace();
    if (tau_grid.size == 1) return out;
    const SuperMatrix step = gen.propagator(tau_grid.step);
    for (std::size_t k = 1; k < tau_grid.size; ++k) {
        v = step * v;
        out.values[k] = left * v;
    }
    if (!v.allFinite()) throw NumericalError("regression correlator produced non-finite values");
    return out;
}

ComplexSamples regression_correlator(const Liouvillian& l, const OperatorMatrix& a_left, const OperatorMatrix& seed,
                                     std::span<const double> tau_points) {
    if (tau_points.empty()) return regression_correlator(l, a_left, seed, UniformGrid{0.0, 1.0, 0});
    if (tau_points.front() != 0.0) throw InvalidArgument("regression grid must start at τ = 0");
    if (!UniformGrid::is_uniform(tau_points)) throw InvalidArgument("regression grid is not uniform");
    const double h = tau_points.size() > 1 ? (tau_points.back() - tau_points.front()) / static_cast<double>(tau_points.size() - 1) : 1.0;
    return regression_correlator(l, a_left, seed, UniformGrid{0.0, h, tau_points.size()});
}

}  // namespace molspec::quantum

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "molspec/core/grid.hpp"
#include "molspec/quantum/liouvillian.hpp"

namespace molspec::quantum {

/// Ordered set of vectorized coordinates. Built from the nonzero pattern of a generator,
/// an invariant Subspace makes restriction exact rather than approximate.
class Subspace {
public:
    Subspace() = default;
    Subspace(std::vector<Eigen::Index> indices, Eigen::Index full_size);

    /// Coordinates reachable from `seed`'s support through the columns of `m`.
    static Subspace reachable(const SuperMatrix& m, const Eigen::Ref<const Vector>& seed);
    /// Weakly connected components of the pattern graph of `m`.
    static std::vector<Subspace> components(const SuperMatrix& m);

    std::size_t size() const noexcept { return indices_.size(); }
    Eigen::Index full_size() const noexcept { return full_size_; }
    const std::vector<Eigen::Index>& indices() const noexcept { return indices_; }

    SuperMatrix restrict_matrix(const SuperMatrix& m) const;
    Vector restrict_vector(const Eigen::Ref<const Vector>& v) const;
    Eigen::RowVectorXcd restrict_row(const Eigen::RowVectorXcd& row) const;
    Vector lift(const Eigen::Ref<const Vector>& v) const;

private:
    std::vector<Eigen::Index> indices_;
    Eigen::Index full_size_ = 0;
};

/// Generator restricted to a reachable subspace, with cached exp(M·h) per step.
class ReducedGenerator {
public:
    ReducedGenerator(const Liouvillian& l, const Eigen::Ref<const Vector>& seed);

    const Subspace& subspace() const noexcept { return subspace_; }
    const SuperMatrix& matrix() const noexcept { return matrix_; }
    /// exp(M·t), scaled-and-squared Padé; throws NumericalError on non-finite output.
    SuperMatrix propagator(double t) const;

private:
    Subspace subspace_;
    SuperMatrix matrix_;
};

/// ρ(t_k) = exp(L t_k) ρ0 for an ascending, non-negative time grid (ps).
std::vector<DensityOperator> evolve(const Liouvillian& l, const DensityOperator& rho0, std::span<const double> t_grid);

/// Unique unit-trace null vector of L; NumericalError if the nullspace is degenerate.
DensityOperator steady_state(const Liouvillian& l);

/// χ = ∫₀^∞ A·ρ(t) dt via L·X = ρ0 − ρ_ss on the trace-zero complement, χ = −A·X.
OperatorMatrix time_integrated_source(const Liouvillian& l, const DensityOperator& rho0, const OperatorMatrix& a);
OperatorMatrix time_integrated_source(const Liouvillian& l, const DensityOperator& rho0, const OperatorMatrix& a,
                                      const DensityOperator& rho_ss);

/// f(τ) = Tr[A_left · exp(Lτ)(seed)] on a uniform grid starting at 0.
ComplexSamples regression_correlator(const Liouvillian& l, const OperatorMatrix& a_left, const OperatorMatrix& seed,
                                     const UniformGrid& tau_grid);
/// Same, for explicit τ points; InvalidArgument unless uniform and starting at 0.
ComplexSamples regression_correlator(const Liouvillian& l, const OperatorMatrix& a_left, const OperatorMatrix& seed,
                                     std::span<const double> tau_points);

}  // namespace molspec::quantum

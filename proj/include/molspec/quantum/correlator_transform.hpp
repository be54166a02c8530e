#pragma once

#include <vector>

#include "molspec/core/grid.hpp"
#include "molspec/quantum/dynamics.hpp"

namespace molspec::quantum {

/// One-sided transform F(ω) = ∫₀^∞ Tr[A exp(Lτ) seed] e^{−iωτ} dτ = l (iω − M)⁻¹ s
/// on the subspace reachable from `seed`, with M = U T U* in Schur form.
///
/// When the triangular factor diagonalizes with bounded amplification, F is kept as
/// Σ c_k / (iω − λ_k) and cell integrals are exact logarithms. Otherwise evaluation
/// falls back to shifted back-substitution and adaptive quadrature over each cell.
class CorrelatorTransform {
public:
    CorrelatorTransform(const Liouvillian& l, const OperatorMatrix& a_left, const OperatorMatrix& seed);

    /// F(ω), ω in 1/ps.
    Complex value(double omega) const;
    /// ∫_{lo}^{hi} F(ω) dω.
    Complex integral(double omega_lo, double omega_hi) const;
    /// Re F averaged over cells of width grid.step centred on each grid point.
    std::vector<double> real_cell_averages(const UniformGrid& omega_grid, int threads = 1) const;
    std::vector<double> real_point_values(const UniformGrid& omega_grid, int threads = 1) const;

    /// Tr[A_left · seed], the correlator at τ = 0.
    Complex initial_value() const noexcept { return initial_; }
    /// Eigenvalues of the reduced generator (all with negative real part).
    const Vector& poles() const noexcept { return poles_; }
    bool uses_pole_expansion() const noexcept { return pole_expansion_; }
    std::size_t reduced_dim() const noexcept { return static_cast<std::size_t>(poles_.size()); }

private:
    Complex resolvent(double omega) const;
    Complex pole_sum(double omega) const;
    Complex pole_integral(double lo, double hi) const;
    Complex quadrature_integral(double lo, double hi) const;

    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> schur_t_;
    Eigen::RowVectorXcd left_;  // l U
    Vector right_;              // U* s
    Vector poles_;
    Vector residues_;
    Complex initial_{0.0, 0.0};
    bool pole_expansion_ = false;
};

}  // namespace molspec::quantum

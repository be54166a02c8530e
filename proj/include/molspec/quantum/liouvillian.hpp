#pragma once

#include <span>

#include "molspec/quantum/operators.hpp"

namespace molspec::quantum {

using SuperMatrix = Eigen::MatrixXcd;

/// One dissipator term rate·ℒ_A with ℒ_A[ρ] = AρA† − ½{A†A, ρ}; rate in 1/ps.
struct LindbladTerm {
    OperatorMatrix op;
    double rate = 0.0;
};

/// Column-stacking vectorization: vec(X)[col·n + row] = X(row, col), so vec(AXB) = (Bᵀ ⊗ A) vec(X).
Vector vectorize(const Matrix& x);
Matrix unvectorize(const Eigen::Ref<const Vector>& v, std::size_t dim);

/// Row vector t with t·vec(X) = Tr X.
Eigen::RowVectorXcd trace_row(std::size_t dim);
/// Row vector l with l·vec(X) = Tr[A X].
Eigen::RowVectorXcd left_trace_row(const Matrix& a);

/// Dense generator acting on column-vectorized density operators.
class Liouvillian {
public:
    /// Dense storage is (dim²)² complex entries; dim 64 already needs 256 MiB.
    static constexpr std::size_t kMaxDenseDim = 64;

    explicit Liouvillian(const CompositeSpace& space);
    Liouvillian(const CompositeSpace& space, SuperMatrix matrix);

    const CompositeSpace& space() const noexcept { return space_; }
    const SuperMatrix& matrix() const noexcept { return matrix_; }
    std::size_t dim() const noexcept { return space_.dim(); }
    std::size_t superdim() const noexcept { return space_.dim() * space_.dim(); }

    /// Adds −i[H, ·]; H in angular units.
    void add_hamiltonian(const Matrix& h);
    void add_dissipator(const Matrix& a, double rate);
    /// Adds coeff·(B ⊗ A) without forming the Kronecker product.
    void add_kron(const Matrix& b, const Matrix& a, Complex coeff);
    void add_superoperator(const SuperMatrix& s);

    Vector apply(const Eigen::Ref<const Vector>& v) const { return matrix_ * v; }
    OperatorMatrix apply(const OperatorMatrix& x) const;

private:
    CompositeSpace space_;
    SuperMatrix matrix_;
};

/// L(ρ) = −i[H, ρ] + Σ rate·ℒ_A(ρ). Throws InvalidArgument on shape mismatch, non-Hermitian H or negative rate.
Liouvillian build_liouvillian(const OperatorMatrix& hamiltonian, std::span<const LindbladTerm> terms);

/// max |t·L| over columns: zero for a trace-preserving generator.
double trace_annihilation_error(const Liouvillian& l);

}  // namespace molspec::quantum

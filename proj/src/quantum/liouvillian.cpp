#include "molspec/quantum/liouvillian.hpp"

#include <cmath>
#include <string>

#include "molspec/core/errors.hpp"

namespace molspec::quantum {

Vector vectorize(const Matrix& x) {
    return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvectorize(const Eigen::Ref<const Vector>& v, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    if (v.size() != n * n) throw InvalidArgument("vector length does not match dim²");
    Matrix out(n, n);
    Eigen::Map<Vector>(out.data(), out.size()) = v;
    return out;
}

Eigen::RowVectorXcd trace_row(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(n * n);
    for (Eigen::Index k = 0; k < n; ++k) t(k * n + k) = 1.0;
    return t;
}

Eigen::RowVectorXcd left_trace_row(const Matrix& a) {
    // Tr[A X] = Σ_ij A_ij X_ji = vec(Aᵀ)·vec(X)
    const Matrix at = a.transpose();
    return Eigen::Map<const Eigen::RowVectorXcd>(at.data(), at.size());
}

Liouvillian::Liouvillian(const CompositeSpace& space) : space_(space) {
    if (space.dim() > kMaxDenseDim)
        throw InvalidArgument("Hilbert dimension " + std::to_string(space.dim()) + " exceeds the dense Liouvillian limit of " +
                              std::to_string(kMaxDenseDim));
    const auto n2 = static_cast<Eigen::Index>(superdim());
    matrix_ = SuperMatrix::Zero(n2, n2);
}

Liouvillian::Liouvillian(const CompositeSpace& space, SuperMatrix matrix) : space_(space), matrix_(std::move(matrix)) {
    if (space.dim() > kMaxDenseDim) throw InvalidArgument("Hilbert dimension exceeds the dense Liouvillian limit");
    const auto n2 = static_cast<Eigen::Index>(superdim());
    if (matrix_.rows() != n2 || matrix_.cols() != n2) throw InvalidArgument("Liouvillian shape does not match its space");
}

void Liouvillian::add_kron(const Matrix& b, const Matrix& a, Complex coeff) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.rows() != n || b.cols() != n || n * n != matrix_.rows())
        throw InvalidArgument("Kronecker factors do not match the Liouvillian");
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex s = coeff * b(i, j);
            if (s != Complex(0.0, 0.0)) matrix_.block(i * n, j * n, n, n) += s * a;
        }
}

void Liouvillian::add_hamiltonian(const Matrix& h) {
    const auto n = static_cast<Eigen::Index>(dim());
    const Matrix id = Matrix::Identity(n, n);
    add_kron(id, h, Complex(0.0, -1.0));
    add_kron(h.transpose(), id, Complex(0.0, 1.0));
}

void Liouvillian::add_dissipator(const Matrix& a, double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidArgument("Lindblad rate must be finite and non-negative");
    if (rate == 0.0) return;
    const auto n = static_cast<Eigen::Index>(dim());
    const Matrix id = Matrix::Identity(n, n);
    const Matrix ada = a.adjoint() * a;
    add_kron(a.conjugate(), a, rate);
    add_kron(id, ada, -0.5 * rate);
    add_kron(ada.transpose(), id, -0.5 * rate);
}

void Liouvillian::add_superoperator(const SuperMatrix& s) {
    if (s.rows() != matrix_.rows() || s.cols() != matrix_.cols()) throw InvalidArgument("superoperator shape mismatch");
    matrix_ += s;
}

OperatorMatrix Liouvillian::apply(const OperatorMatrix& x) const {
    if (!(x.space == space_)) throw InvalidArgument("operator and Liouvillian live on different spaces");
    return {space_, unvectorize(matrix_ * vectorize(x.data), dim())};
}

Liouvillian build_liouvillian(const OperatorMatrix& hamiltonian, std::span<const LindbladTerm> terms) {
    const CompositeSpace& space = hamiltonian.space;
    const auto n = static_cast<Eigen::Index>(space.dim());
    if (hamiltonian.data.rows() != n || hamiltonian.data.cols() != n) throw InvalidArgument("Hamiltonian shape mismatch");
    const double scale = std::max(1.0, hamiltonian.data.cwiseAbs().maxCoeff());
    if (hermiticity_error(hamiltonian.data) > 1e-12 * scale) throw InvalidArgument("Hamiltonian is not Hermitian");

    Liouvillian l(space);
    l.add_hamiltonian(hamiltonian.data);
    for (const auto& term : terms) {
        if (!(term.op.space == space) || term.op.data.rows() != n || term.op.data.cols() != n)
            throw InvalidArgument("Lindblad operator shape mismatch");
        if (!(term.rate >= 0.0)) throw InvalidArgument("Lindblad rate must be non-negative");
        l.add_dissipator(term.op.data, term.rate);
    }
    return l;
}

double trace_annihilation_error(const Liouvillian& l) {
    if (l.superdim() == 0) return 0.0;
    return (trace_row(l.dim()) * l.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace molspec::quantum

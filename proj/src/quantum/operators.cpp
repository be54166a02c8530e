#include "molspec/quantum/operators.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <string>

#include "molspec/core/errors.hpp"

namespace molspec::quantum {

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (!(a.space == b.space)) throw InvalidArgument("operators live on different spaces");
}

void require_mode(const CompositeSpace& space, int mode) {
    if (mode < 0 || mode >= space.n_modes())
        throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for " +
                              std::to_string(space.n_modes()) + " modes");
}

Eigen::Matrix2cd lowering() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 1) = 1.0;
    return m;
}

}  // namespace

OperatorMatrix::OperatorMatrix(CompositeSpace s, Matrix m) : space(s), data(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(space.dim());
    if (data.rows() != n || data.cols() != n) throw InvalidArgument("operator shape does not match its space");
}

OperatorMatrix OperatorMatrix::zero(const CompositeSpace& s) {
    const auto n = static_cast<Eigen::Index>(s.dim());
    return {s, Matrix::Zero(n, n)};
}

OperatorMatrix OperatorMatrix::identity(const CompositeSpace& s) {
    const auto n = static_cast<Eigen::Index>(s.dim());
    return {s, Matrix::Identity(n, n)};
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
    require_same_space(*this, rhs);
    data += rhs.data;
    return *this;
}

OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs += rhs; }

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    require_same_space(lhs, rhs);
    return {lhs.space, lhs.data * rhs.data};
}

OperatorMatrix operator*(Complex s, OperatorMatrix op) { return op *= s; }

double hermiticity_error(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityDiagnostics diagnose_density(const Matrix& rho) {
    DensityDiagnostics d;
    d.hermiticity_error = hermiticity_error(rho);
    d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

void validate_density(const DensityOperator& rho) {
    const auto d = diagnose_density(rho.data);
    if (!(d.hermiticity_error < 1e-10)) throw NumericalError("density operator is not Hermitian");
    if (!(d.trace_error < 1e-10)) throw NumericalError("density operator trace differs from 1");
    if (!(d.min_eigenvalue > -1e-8)) throw NumericalError("density operator has a negative eigenvalue");
}

OperatorKind OperatorKind::from_name(std::string_view name, int mode, double ratio) {
    if (name == "sigma") return sigma();
    if (name == "sigma_dag_sigma") return sigma_dag_sigma();
    if (name == "a") return annihilation(mode);
    if (name == "n") return number(mode);
    if (name == "displacement") return displacement(mode, ratio);
    if (name == "dressed_sigma") return dressed_sigma({});
    throw InvalidArgument("unknown operator kind '" + std::string(name) + "'");
}

Eigen::Matrix2cd truncated_displacement(double r) {
    Eigen::Matrix2cd gen;
    gen << 0.0, -r, r, 0.0;
    return gen.exp();
}

Eigen::Matrix2cd truncated_thermal_state(double occupation) {
    if (!(occupation >= 0.0)) throw InvalidArgument("thermal occupation must be non-negative");
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    const double denom = 2.0 * occupation + 1.0;
    rho(0, 0) = (occupation + 1.0) / denom;
    rho(1, 1) = occupation / denom;
    return rho;
}

Matrix embed_factor(const CompositeSpace& space, int factor, const Eigen::Matrix2cd& local) {
    if (factor < 0 || factor > space.n_modes()) throw InvalidArgument("tensor factor out of range");
    Matrix out = (factor == 0) ? Matrix(local) : Matrix(Matrix::Identity(2, 2));
    for (int f = 1; f <= space.n_modes(); ++f) {
        const Matrix piece = (f == factor) ? Matrix(local) : Matrix(Matrix::Identity(2, 2));
        out = Matrix(Eigen::kroneckerProduct(out, piece));
    }
    return out;
}

OperatorMatrix embed_operator(const CompositeSpace& space, const OperatorKind& kind) {
    using Tag = OperatorKind::Tag;
    switch (kind.tag) {
        case Tag::sigma:
            return {space, embed_factor(space, 0, lowering())};
        case Tag::sigma_dag_sigma: {
            Eigen::Matrix2cd ee = Eigen::Matrix2cd::Zero();
            ee(1, 1) = 1.0;
            return {space, embed_factor(space, 0, ee)};
        }
        case Tag::annihilation:
            require_mode(space, kind.mode);
            return {space, embed_factor(space, kind.mode + 1, lowering())};
        case Tag::number: {
            require_mode(space, kind.mode);
            Eigen::Matrix2cd n = Eigen::Matrix2cd::Zero();
            n(1, 1) = 1.0;
            return {space, embed_factor(space, kind.mode + 1, n)};
        }
        case Tag::displacement:
            require_mode(space, kind.mode);
            return {space, embed_factor(space, kind.mode + 1, truncated_displacement(kind.ratio))};
        case Tag::dressed_sigma: {
            if (kind.ratios.size() != static_cast<std::size_t>(space.n_modes()))
                throw InvalidArgument("dressed_sigma needs one displacement ratio per mode");
            Matrix out = lowering();
            for (double r : kind.ratios) out = Matrix(Eigen::kroneckerProduct(out, Matrix(truncated_displacement(r))));
            return {space, out};
        }
    }
    throw InvalidArgument("unknown operator kind");
}

}  // namespace molspec::quantum

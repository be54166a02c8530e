#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "molspec/quantum/space.hpp"

namespace molspec::quantum {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Dense operator on a CompositeSpace. Hamiltonians are stored in angular units (1/ps).
struct OperatorMatrix {
    CompositeSpace space;
    Matrix data;

    OperatorMatrix() = default;
    OperatorMatrix(CompositeSpace s, Matrix m);

    static OperatorMatrix zero(const CompositeSpace& s);
    static OperatorMatrix identity(const CompositeSpace& s);

    std::size_t dim() const noexcept { return space.dim(); }
    OperatorMatrix adjoint() const { return {space, data.adjoint()}; }
    Complex trace() const { return data.trace(); }

    OperatorMatrix& operator+=(const OperatorMatrix& rhs);
    OperatorMatrix& operator*=(Complex s) { data *= s; return *this; }
};

OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(Complex s, OperatorMatrix op);

/// Density operators share the representation; `validate_density` checks the physical constraints.
using DensityOperator = OperatorMatrix;

/// Largest entry of |M − M†|.
double hermiticity_error(const Matrix& m);

struct DensityDiagnostics {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
};
DensityDiagnostics diagnose_density(const Matrix& rho);

/// Throws NumericalError unless rho is Hermitian, unit trace (1e−10) and PSD (−1e−8).
void validate_density(const DensityOperator& rho);

/// Which operator `embed_operator` builds. Mode indices are 0-based.
struct OperatorKind {
    enum class Tag { sigma, sigma_dag_sigma, annihilation, number, displacement, dressed_sigma };

    Tag tag = Tag::sigma;
    int mode = -1;
    double ratio = 0.0;          // displacement ratio η/Δ for Tag::displacement
    std::vector<double> ratios;  // per-mode η/Δ for Tag::dressed_sigma

    static OperatorKind sigma() { return {Tag::sigma, -1, 0.0, {}}; }
    static OperatorKind sigma_dag_sigma() { return {Tag::sigma_dag_sigma, -1, 0.0, {}}; }
    static OperatorKind annihilation(int i) { return {Tag::annihilation, i, 0.0, {}}; }
    static OperatorKind number(int i) { return {Tag::number, i, 0.0, {}}; }
    static OperatorKind displacement(int i, double r) { return {Tag::displacement, i, r, {}}; }
    static OperatorKind dressed_sigma(std::vector<double> r) { return {Tag::dressed_sigma, -1, 0.0, std::move(r)}; }

    /// Parses "sigma", "sigma_dag_sigma", "a", "n", "displacement", "dressed_sigma".
    static OperatorKind from_name(std::string_view name, int mode = -1, double ratio = 0.0);
};

OperatorMatrix embed_operator(const CompositeSpace& space, const OperatorKind& kind);

/// Places a 2×2 factor at tensor position `factor` (0 = TLS, i+1 = mode i), identity elsewhere.
Matrix embed_factor(const CompositeSpace& space, int factor, const Eigen::Matrix2cd& local);

/// exp[r(a† − a)] evaluated within the two-level mode space.
Eigen::Matrix2cd truncated_displacement(double r);

/// Thermal two-level mode state with p1/p0 = n/(n+1).
Eigen::Matrix2cd truncated_thermal_state(double occupation);

}  // namespace molspec::quantum

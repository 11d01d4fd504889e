#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tqp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Largest absolute entry, the ‖·‖_max norm used for algebraic residuals.
double max_abs(const Matrix& m);

/// Spectral norm (largest singular value).
double operator_norm(const Matrix& m);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);

/// Kronecker product a ⊗ b with a as the most significant factor.
Matrix kron(const Matrix& a, const Matrix& b);

/// ‖A†A − I‖_max.
double unitarity_defect(const Matrix& u);
/// ‖A − A†‖_max.
double hermiticity_defect(const Matrix& a);

/// Trace distance ½‖a − b‖₁ between two Hermitian matrices.
double trace_distance(const Matrix& a, const Matrix& b);

/// Eigenvalues of a Hermitian matrix, ascending.
RealVector hermitian_eigenvalues(const Matrix& a);

/// Phase-gauged distance between two operators on a column subspace.
///
/// Restricts both operators to the given columns, picks the global phase
/// e^{iφ} maximizing |Tr(U†V)| and returns ‖U·e^{iφ} − V‖₂ on those
/// columns. An empty column list means all columns.
double gauged_distance(const Matrix& u, const Matrix& v,
                       std::span<const std::size_t> columns = {});

Matrix select_columns(const Matrix& m, std::span<const std::size_t> columns);

/// Exact integer power by repeated squaring.
Matrix matrix_power(const Matrix& m, std::size_t exponent);

}  // namespace tqp

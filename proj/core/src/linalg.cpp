#include "tqp/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace tqp {

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitarity_defect: matrix is not square");
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

double hermiticity_defect(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermiticity_defect: matrix is not square");
  return max_abs(a - a.adjoint());
}

RealVector hermitian_eigenvalues(const Matrix& a) {
  Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigenvalues: solver failed");
  return solver.eigenvalues();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

Matrix select_columns(const Matrix& m, std::span<const std::size_t> columns) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(columns[j]));
  }
  return out;
}

double gauged_distance(const Matrix& u, const Matrix& v, std::span<const std::size_t> columns) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("gauged_distance: dimension mismatch");
  }
  Matrix us = columns.empty() ? u : select_columns(u, columns);
  Matrix vs = columns.empty() ? v : select_columns(v, columns);
  cplx overlap = (us.adjoint() * vs).trace();
  cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
  return operator_norm(us * phase - vs);
}

Matrix matrix_power(const Matrix& m, std::size_t exponent) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_power: matrix is not square");
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix base = m;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace tqp

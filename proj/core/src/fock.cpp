#include "tqp/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace tqp {

// ---------------------------------------------------------------- layout

SpaceLayout::SpaceLayout(std::size_t qubit_count, std::vector<std::size_t> mode_cutoffs)
    : qubits_(qubit_count), cutoffs_(std::move(mode_cutoffs)) {
  for (std::size_t d : cutoffs_) {
    if (d < 2) throw LayoutError("SpaceLayout: every mode cutoff must be at least 2");
  }
  dims_.assign(qubits_, 2);
  dims_.insert(dims_.end(), cutoffs_.begin(), cutoffs_.end());
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (std::size_t s = dims_.size(); s-- > 0;) {
    strides_[s] = total_;
    total_ *= dims_[s];
  }
}

SpaceLayout SpaceLayout::uniform(std::size_t qubit_count, std::size_t mode_count, std::size_t cutoff) {
  return SpaceLayout(qubit_count, std::vector<std::size_t>(mode_count, cutoff));
}

std::size_t SpaceLayout::cutoff(std::size_t mode) const {
  if (mode >= cutoffs_.size()) throw LayoutError("SpaceLayout: invalid mode index " + std::to_string(mode));
  return cutoffs_[mode];
}

std::size_t SpaceLayout::qubit_subsystem(std::size_t qubit) const {
  if (qubit >= qubits_) throw LayoutError("SpaceLayout: invalid qubit index " + std::to_string(qubit));
  return qubit;
}

std::size_t SpaceLayout::mode_subsystem(std::size_t mode) const {
  if (mode >= cutoffs_.size()) throw LayoutError("SpaceLayout: invalid mode index " + std::to_string(mode));
  return qubits_ + mode;
}

std::size_t SpaceLayout::index(std::span<const std::size_t> digits) const {
  if (digits.size() != dims_.size()) throw LayoutError("SpaceLayout::index: wrong digit count");
  std::size_t idx = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (digits[s] >= dims_[s]) throw LayoutError("SpaceLayout::index: digit out of range");
    idx += digits[s] * strides_[s];
  }
  return idx;
}

std::vector<std::size_t> SpaceLayout::digits(std::size_t index) const {
  if (index >= total_) throw LayoutError("SpaceLayout::digits: index out of range");
  std::vector<std::size_t> out(dims_.size());
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    out[s] = (index / strides_[s]) % dims_[s];
  }
  return out;
}

std::string SpaceLayout::describe() const {
  std::ostringstream os;
  os << qubits_ << " qubit(s), modes [";
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) os << (i ? "," : "") << cutoffs_[i];
  os << "], dim " << total_;
  return os.str();
}

// ---------------------------------------------------------------- operators

TruncatedOperator::TruncatedOperator(SpaceLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)), flags_(std::make_shared<Flags>()) {
  const auto n = static_cast<Eigen::Index>(layout_.total_dim());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw LayoutError("TruncatedOperator: matrix size does not match layout (" + layout_.describe() + ")");
  }
}

TruncatedOperator TruncatedOperator::identity(const SpaceLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  return {layout, Matrix::Identity(n, n)};
}

bool TruncatedOperator::is_unitary() const {
  std::call_once(flags_->unitary_once,
                 [this] { flags_->unitary = unitarity_defect(matrix_) <= kUnitaryTolerance; });
  return flags_->unitary;
}

bool TruncatedOperator::is_hermitian() const {
  std::call_once(flags_->hermitian_once,
                 [this] { flags_->hermitian = hermiticity_defect(matrix_) <= kHermitianTolerance; });
  return flags_->hermitian;
}

namespace {

void require_same_layout(const TruncatedOperator& a, const TruncatedOperator& b, const char* what) {
  if (!(a.layout() == b.layout())) throw LayoutError(std::string(what) + ": layout mismatch");
}

}  // namespace

TruncatedOperator compose(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_layout(a, b, "compose");
  return {a.layout(), a.matrix() * b.matrix()};
}

TruncatedOperator adjoint(const TruncatedOperator& a) { return {a.layout(), a.matrix().adjoint()}; }

Matrix expm(const Matrix& generator) {
  if (generator.rows() != generator.cols()) throw std::invalid_argument("expm: matrix is not square");
  if (generator.size() == 0) return generator;
  return generator.exp();
}

TruncatedOperator matrix_exponential(const TruncatedOperator& generator) {
  return {generator.layout(), expm(generator.matrix())};
}

TruncatedOperator operator*(const TruncatedOperator& a, const TruncatedOperator& b) { return compose(a, b); }

TruncatedOperator operator+(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_layout(a, b, "operator+");
  return {a.layout(), a.matrix() + b.matrix()};
}

TruncatedOperator operator-(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_layout(a, b, "operator-");
  return {a.layout(), a.matrix() - b.matrix()};
}

TruncatedOperator operator*(cplx s, const TruncatedOperator& a) { return {a.layout(), s * a.matrix()}; }

LocalOperator::LocalOperator(SpaceLayout layout, std::vector<std::size_t> targets, Matrix matrix)
    : layout_(std::move(layout)), targets_(std::move(targets)), matrix_(std::move(matrix)) {
  if (targets_.empty()) throw LayoutError("LocalOperator: no target subsystems");
  std::vector<bool> is_target(layout_.subsystem_count(), false);
  std::size_t local_dim = 1;
  for (std::size_t t : targets_) {
    if (t >= layout_.subsystem_count()) throw LayoutError("LocalOperator: target out of range");
    if (is_target[t]) throw LayoutError("LocalOperator: repeated target subsystem");
    is_target[t] = true;
    local_dim *= layout_.subsystem_dim(t);
  }
  const auto ld = static_cast<Eigen::Index>(local_dim);
  if (matrix_.rows() != ld || matrix_.cols() != ld) {
    throw LayoutError("LocalOperator: matrix size does not match target dimensions");
  }

  offsets_.assign(local_dim, 0);
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t rem = l;
    std::size_t off = 0;
    for (std::size_t i = targets_.size(); i-- > 0;) {
      const std::size_t d = layout_.subsystem_dim(targets_[i]);
      off += (rem % d) * layout_.stride(targets_[i]);
      rem /= d;
    }
    offsets_[l] = off;
  }

  bases_.reserve(layout_.total_dim() / local_dim);
  for (std::size_t idx = 0; idx < layout_.total_dim(); ++idx) {
    bool zero_on_targets = true;
    for (std::size_t t : targets_) {
      if ((idx / layout_.stride(t)) % layout_.subsystem_dim(t) != 0) {
        zero_on_targets = false;
        break;
      }
    }
    if (zero_on_targets) bases_.push_back(idx);
  }

  Matrix off_diag = matrix_;
  off_diag.diagonal().setZero();
  diagonal_ = max_abs(off_diag) == 0.0;
}

void LocalOperator::apply(Vector& state) const {
  if (state.size() != static_cast<Eigen::Index>(layout_.total_dim())) {
    throw LayoutError("LocalOperator::apply: state dimension mismatch");
  }
  const auto l = static_cast<Eigen::Index>(offsets_.size());
  if (diagonal_) {
    for (std::size_t base : bases_) {
      for (Eigen::Index c = 0; c < l; ++c) state(static_cast<Eigen::Index>(base + offsets_[c])) *= matrix_(c, c);
    }
    return;
  }
  Vector in(l), out(l);
  for (std::size_t base : bases_) {
    for (Eigen::Index c = 0; c < l; ++c) in(c) = state(static_cast<Eigen::Index>(base + offsets_[c]));
    out.noalias() = matrix_ * in;
    for (Eigen::Index c = 0; c < l; ++c) state(static_cast<Eigen::Index>(base + offsets_[c])) = out(c);
  }
}

void LocalOperator::apply_left(Matrix& m) const {
  if (m.rows() != static_cast<Eigen::Index>(layout_.total_dim())) {
    throw LayoutError("LocalOperator::apply_left: dimension mismatch");
  }
  const auto l = static_cast<Eigen::Index>(offsets_.size());
  if (diagonal_) {
    for (std::size_t base : bases_) {
      for (Eigen::Index c = 0; c < l; ++c) m.row(static_cast<Eigen::Index>(base + offsets_[c])) *= matrix_(c, c);
    }
    return;
  }
  Matrix in(l, m.cols()), out(l, m.cols());
  for (std::size_t base : bases_) {
    for (Eigen::Index c = 0; c < l; ++c) in.row(c) = m.row(static_cast<Eigen::Index>(base + offsets_[c]));
    out.noalias() = matrix_ * in;
    for (Eigen::Index c = 0; c < l; ++c) m.row(static_cast<Eigen::Index>(base + offsets_[c])) = out.row(c);
  }
}

void LocalOperator::conjugate(Matrix& rho) const {
  apply_left(rho);
  rho.adjointInPlace();
  apply_left(rho);
  rho.adjointInPlace();
}

LocalOperator LocalOperator::adjoint() const { return {layout_, targets_, matrix_.adjoint()}; }

TruncatedOperator tensor_embed(const LocalOperator& op) {
  const SpaceLayout& layout = op.layout();
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  Matrix full = Matrix::Zero(n, n);
  const auto& off = op.local_offsets();
  const Matrix& m = op.matrix();
  for (std::size_t base : op.rest_bases()) {
    for (std::size_t r = 0; r < off.size(); ++r) {
      for (std::size_t c = 0; c < off.size(); ++c) {
        const cplx v = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (v != cplx{}) {
          full(static_cast<Eigen::Index>(base + off[r]), static_cast<Eigen::Index>(base + off[c])) = v;
        }
      }
    }
  }
  return {layout, std::move(full)};
}

// ---------------------------------------------------------------- builders

Matrix annihilation_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

Matrix number_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
  return m;
}

Matrix parity_matrix(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

Matrix pauli_matrix(Pauli p) {
  Matrix m(2, 2);
  switch (p) {
    case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::Y: m << 0.0, -kI, kI, 0.0; break;
    case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

namespace local {
namespace {

std::size_t checked_pair(const SpaceLayout& layout, std::size_t a, std::size_t b) {
  if (a == b) throw LayoutError("two-mode operator requires distinct modes");
  const std::size_t d = layout.cutoff(a);
  if (layout.cutoff(b) != d) throw LayoutError("two-mode operator requires equal cutoffs");
  return d;
}

LocalOperator single_mode(const SpaceLayout& layout, std::size_t mode, Matrix m) {
  return {layout, {layout.mode_subsystem(mode)}, std::move(m)};
}

}  // namespace

LocalOperator annihilation(const SpaceLayout& layout, std::size_t mode) {
  return single_mode(layout, mode, annihilation_matrix(layout.cutoff(mode)));
}

LocalOperator creation(const SpaceLayout& layout, std::size_t mode) {
  return single_mode(layout, mode, annihilation_matrix(layout.cutoff(mode)).adjoint());
}

LocalOperator number(const SpaceLayout& layout, std::size_t mode) {
  return single_mode(layout, mode, number_matrix(layout.cutoff(mode)));
}

LocalOperator parity(const SpaceLayout& layout, std::size_t mode) {
  return single_mode(layout, mode, parity_matrix(layout.cutoff(mode)));
}

LocalOperator phase_shift(const SpaceLayout& layout, std::size_t mode, double phi) {
  const std::size_t d = layout.cutoff(mode);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) {
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = std::exp(kI * (phi * static_cast<double>(k)));
  }
  return single_mode(layout, mode, std::move(m));
}

LocalOperator displacement(const SpaceLayout& layout, std::size_t mode, cplx alpha) {
  const Matrix a = annihilation_matrix(layout.cutoff(mode));
  return single_mode(layout, mode, expm(alpha * a.adjoint() - std::conj(alpha) * a));
}

LocalOperator beam_splitter(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b, double angle) {
  const std::size_t d = checked_pair(layout, mode_a, mode_b);
  // The d² × d² exponential dominates gate construction; memoize it.
  static std::mutex guard;
  static std::map<std::pair<std::size_t, double>, Matrix> cache;
  const auto key = std::make_pair(d, angle);
  Matrix u;
  {
    std::lock_guard<std::mutex> lock(guard);
    if (auto it = cache.find(key); it != cache.end()) u = it->second;
  }
  if (u.size() == 0) {
    const Matrix a = annihilation_matrix(d);
    const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const Matrix aa = kron(a, id);
    const Matrix ab = kron(id, a);
    u = expm(angle * (ab * aa.adjoint() - ab.adjoint() * aa));
    std::lock_guard<std::mutex> lock(guard);
    if (cache.size() >= 32) cache.clear();
    cache.emplace(key, u);
  }
  return {layout, {layout.mode_subsystem(mode_a), layout.mode_subsystem(mode_b)}, std::move(u)};
}

LocalOperator beam_splitter_5050(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b) {
  return beam_splitter(layout, mode_a, mode_b, kPi / 4.0);
}

LocalOperator two_mode_swap(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b) {
  const std::size_t d = checked_pair(layout, mode_a, mode_b);
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix s = Matrix::Zero(n, n);
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t k = 0; k < d; ++k) {
      s(static_cast<Eigen::Index>(k * d + m), static_cast<Eigen::Index>(m * d + k)) = 1.0;
    }
  }
  return {layout, {layout.mode_subsystem(mode_a), layout.mode_subsystem(mode_b)}, std::move(s)};
}

LocalOperator controlled_parity(const SpaceLayout& layout, std::size_t qubit, std::size_t mode) {
  const std::size_t d = layout.cutoff(mode);
  const auto n = static_cast<Eigen::Index>(d);
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = Matrix::Identity(n, n);
  m.bottomRightCorner(n, n) = parity_matrix(d);
  return {layout, {layout.qubit_subsystem(qubit), layout.mode_subsystem(mode)}, std::move(m)};
}

LocalOperator pauli(const SpaceLayout& layout, std::size_t qubit, Pauli p) {
  return {layout, {layout.qubit_subsystem(qubit)}, pauli_matrix(p)};
}

LocalOperator qubit_rotation(const SpaceLayout& layout, std::size_t qubit, Pauli axis, double theta) {
  Matrix r = std::cos(theta) * Matrix::Identity(2, 2) + kI * std::sin(theta) * pauli_matrix(axis);
  return {layout, {layout.qubit_subsystem(qubit)}, std::move(r)};
}

}  // namespace local

TruncatedOperator annihilation(const SpaceLayout& layout, std::size_t mode) {
  return tensor_embed(local::annihilation(layout, mode));
}
TruncatedOperator creation(const SpaceLayout& layout, std::size_t mode) {
  return tensor_embed(local::creation(layout, mode));
}
TruncatedOperator number(const SpaceLayout& layout, std::size_t mode) {
  return tensor_embed(local::number(layout, mode));
}
TruncatedOperator parity(const SpaceLayout& layout, std::size_t mode) {
  return tensor_embed(local::parity(layout, mode));
}
TruncatedOperator phase_shift(const SpaceLayout& layout, std::size_t mode, double phi) {
  return tensor_embed(local::phase_shift(layout, mode, phi));
}
TruncatedOperator displacement(const SpaceLayout& layout, std::size_t mode, cplx alpha) {
  return tensor_embed(local::displacement(layout, mode, alpha));
}
TruncatedOperator beam_splitter_5050(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b) {
  return tensor_embed(local::beam_splitter_5050(layout, mode_a, mode_b));
}
TruncatedOperator two_mode_swap(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b) {
  return tensor_embed(local::two_mode_swap(layout, mode_a, mode_b));
}
TruncatedOperator controlled_parity(const SpaceLayout& layout, std::size_t qubit, std::size_t mode) {
  return tensor_embed(local::controlled_parity(layout, qubit, mode));
}
TruncatedOperator pauli(const SpaceLayout& layout, std::size_t qubit, Pauli p) {
  return tensor_embed(local::pauli(layout, qubit, p));
}
TruncatedOperator qubit_rotation(const SpaceLayout& layout, std::size_t qubit, Pauli axis, double theta) {
  return tensor_embed(local::qubit_rotation(layout, qubit, axis, theta));
}

// ---------------------------------------------------------------- states

HybridState::HybridState(SpaceLayout layout, bool pure, Vector psi, Matrix rho, double discarded)
    : layout_(std::move(layout)), pure_(pure), psi_(std::move(psi)), rho_(std::move(rho)), discarded_(discarded) {
  const auto n = static_cast<Eigen::Index>(layout_.total_dim());
  if (pure_ ? psi_.size() != n : (rho_.rows() != n || rho_.cols() != n)) {
    throw LayoutError("HybridState: dimension does not match layout (" + layout_.describe() + ")");
  }
  refresh_tail();
}

HybridState HybridState::pure(SpaceLayout layout, Vector psi, double discarded_weight) {
  return {std::move(layout), true, std::move(psi), Matrix(), discarded_weight};
}

HybridState HybridState::mixed(SpaceLayout layout, Matrix rho, double discarded_weight) {
  return {std::move(layout), false, Vector(), std::move(rho), discarded_weight};
}

HybridState HybridState::basis(const SpaceLayout& layout, std::span<const std::size_t> digits) {
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  psi(static_cast<Eigen::Index>(layout.index(digits))) = 1.0;
  return pure(layout, std::move(psi));
}

const Vector& HybridState::vector() const {
  if (!pure_) throw StateError("HybridState::vector: state is a density matrix");
  return psi_;
}

const Matrix& HybridState::density() const {
  if (pure_) throw StateError("HybridState::density: state is a pure vector");
  return rho_;
}

Matrix HybridState::to_density() const { return pure_ ? Matrix(psi_ * psi_.adjoint()) : rho_; }

HybridState HybridState::as_mixed() const { return mixed(layout_, to_density(), discarded_); }

double HybridState::trace() const { return pure_ ? psi_.squaredNorm() : rho_.trace().real(); }

RealVector HybridState::populations() const {
  return pure_ ? RealVector(psi_.cwiseAbs2()) : RealVector(rho_.diagonal().real());
}

void HybridState::refresh_tail() {
  tail_ = 0.0;
  if (layout_.mode_count() == 0) return;
  const RealVector pop = populations();
  for (std::size_t m = 0; m < layout_.mode_count(); ++m) {
    const std::size_t s = layout_.mode_subsystem(m);
    const std::size_t stride = layout_.stride(s);
    const std::size_t d = layout_.subsystem_dim(s);
    double w = 0.0;
    for (Eigen::Index i = 0; i < pop.size(); ++i) {
      if ((static_cast<std::size_t>(i) / stride) % d == d - 1) w += pop(i);
    }
    tail_ = std::max(tail_, w);
  }
}

cplx HybridState::expectation(const Matrix& op) const {
  if (op.rows() != static_cast<Eigen::Index>(layout_.total_dim())) {
    throw LayoutError("HybridState::expectation: operator dimension mismatch");
  }
  return pure_ ? psi_.dot(op * psi_) : (op * rho_).trace();
}

cplx HybridState::expectation(const TruncatedOperator& op) const {
  if (!(op.layout() == layout_)) throw LayoutError("HybridState::expectation: layout mismatch");
  return expectation(op.matrix());
}

HybridState HybridState::evolved(const TruncatedOperator& u) const {
  if (!(u.layout() == layout_)) throw LayoutError("HybridState::evolved: layout mismatch");
  if (pure_) return pure(layout_, u.matrix() * psi_, discarded_);
  return mixed(layout_, u.matrix() * rho_ * u.matrix().adjoint(), discarded_);
}

HybridState HybridState::evolved(const LocalOperator& u) const {
  if (!(u.layout() == layout_)) throw LayoutError("HybridState::evolved: layout mismatch");
  if (pure_) {
    Vector psi = psi_;
    u.apply(psi);
    return pure(layout_, std::move(psi), discarded_);
  }
  Matrix rho = rho_;
  u.conjugate(rho);
  return mixed(layout_, std::move(rho), discarded_);
}

HybridState HybridState::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw StateError("HybridState::normalized: zero trace");
  return pure_ ? pure(layout_, psi_ / std::sqrt(t), discarded_) : mixed(layout_, rho_ / t, discarded_);
}

Matrix HybridState::reduced_qubit(std::size_t qubit) const {
  const std::size_t sq = layout_.stride(layout_.qubit_subsystem(qubit));
  const std::size_t n = layout_.total_dim();
  Matrix out = Matrix::Zero(2, 2);
  for (std::size_t hi = 0; hi < n / (2 * sq); ++hi) {
    for (std::size_t lo = 0; lo < sq; ++lo) {
      const auto i0 = static_cast<Eigen::Index>(hi * 2 * sq + lo);
      const auto i1 = static_cast<Eigen::Index>(i0 + static_cast<Eigen::Index>(sq));
      if (pure_) {
        out(0, 0) += psi_(i0) * std::conj(psi_(i0));
        out(0, 1) += psi_(i0) * std::conj(psi_(i1));
        out(1, 0) += psi_(i1) * std::conj(psi_(i0));
        out(1, 1) += psi_(i1) * std::conj(psi_(i1));
      } else {
        out(0, 0) += rho_(i0, i0);
        out(0, 1) += rho_(i0, i1);
        out(1, 0) += rho_(i1, i0);
        out(1, 1) += rho_(i1, i1);
      }
    }
  }
  return out;
}

void HybridState::validate(double trace_tol) const {
  const double t = trace();
  if (std::abs(t - 1.0) > trace_tol) {
    throw StateError("HybridState: trace " + std::to_string(t) + " deviates from 1");
  }
  if (!pure_) {
    if (hermiticity_defect(rho_) > kHermitianTolerance) throw StateError("HybridState: density not Hermitian");
    if (hermitian_eigenvalues(rho_).minCoeff() < -1e-10) {
      throw StateError("HybridState: density not positive semidefinite");
    }
  }
}

HybridState tensor_product(const HybridState& a, const HybridState& b) {
  if (a.layout().mode_count() > 0 && b.layout().qubit_count() > 0) {
    throw LayoutError("tensor_product: qubits of the right factor would follow modes of the left");
  }
  std::vector<std::size_t> cutoffs = a.layout().mode_cutoffs();
  cutoffs.insert(cutoffs.end(), b.layout().mode_cutoffs().begin(), b.layout().mode_cutoffs().end());
  SpaceLayout layout(a.layout().qubit_count() + b.layout().qubit_count(), std::move(cutoffs));
  const double discarded = 1.0 - (1.0 - a.discarded_weight()) * (1.0 - b.discarded_weight());
  if (a.is_pure() && b.is_pure()) {
    Vector psi(static_cast<Eigen::Index>(layout.total_dim()));
    const Vector& va = a.vector();
    const Vector& vb = b.vector();
    for (Eigen::Index i = 0; i < va.size(); ++i) psi.segment(i * vb.size(), vb.size()) = va(i) * vb;
    return HybridState::pure(std::move(layout), std::move(psi), discarded);
  }
  return HybridState::mixed(std::move(layout), kron(a.to_density(), b.to_density()), discarded);
}

HybridState project_qubit(const HybridState& state, std::size_t qubit, const Vector& bra) {
  const SpaceLayout& layout = state.layout();
  const std::size_t sq = layout.stride(layout.qubit_subsystem(qubit));
  const std::size_t n = layout.total_dim();
  SpaceLayout reduced(layout.qubit_count() - 1, layout.mode_cutoffs());
  const std::size_t m = reduced.total_dim();
  auto full_index = [sq](std::size_t r, std::size_t j) {
    return static_cast<Eigen::Index>((r / sq) * 2 * sq + j * sq + (r % sq));
  };
  (void)n;
  if (state.is_pure()) {
    const Vector& psi = state.vector();
    Vector out(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) {
      out(static_cast<Eigen::Index>(r)) =
          std::conj(bra(0)) * psi(full_index(r, 0)) + std::conj(bra(1)) * psi(full_index(r, 1));
    }
    return HybridState::pure(std::move(reduced), std::move(out), state.discarded_weight());
  }
  const Matrix& rho = state.density();
  Matrix out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = 0; r < m; ++r) {
      cplx v{};
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
          v += std::conj(bra(static_cast<Eigen::Index>(j))) * rho(full_index(r, j), full_index(c, k)) *
               bra(static_cast<Eigen::Index>(k));
        }
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return HybridState::mixed(std::move(reduced), std::move(out), state.discarded_weight());
}

HybridState trace_out_qubits(const HybridState& state) {
  const SpaceLayout& layout = state.layout();
  SpaceLayout modes(0, layout.mode_cutoffs());
  const auto m = static_cast<Eigen::Index>(modes.total_dim());
  const Eigen::Index blocks = static_cast<Eigen::Index>(layout.total_dim()) / m;
  const Matrix rho = state.to_density();
  Matrix out = Matrix::Zero(m, m);
  for (Eigen::Index b = 0; b < blocks; ++b) out += rho.block(b * m, b * m, m, m);
  return HybridState::mixed(std::move(modes), std::move(out), state.discarded_weight());
}

Vector plus_state() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

Vector minus_state() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace tqp

#pragma once

// Truncated Fock-space operator algebra on hybrid (qubits ⊗ qumodes) spaces.
//
// Tensor order is fixed: auxiliary qubits first (index 0 most significant),
// then qumodes by index. Qubit basis |0⟩ is the Z = +1 eigenstate and |1⟩
// the Z = −1 eigenstate. Mode m keeps Fock levels |0⟩..|d_m − 1⟩.
//
// Beam-splitter convention: B = exp(π/4 (a_b a_a† − a_b† a_a)) maps
// a_a → (a_a − a_b)/√2 under B a B†, hence B|1,0⟩ = (|1,0⟩ − |0,1⟩)/√2 and
// B† P_b B equals the swap S_ab on every total-number block that fits under
// both cutoffs.

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqp/linalg.hpp"

namespace tqp {

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;

enum class Pauli { X, Y, Z };

class SpaceLayout {
 public:
  SpaceLayout(std::size_t qubit_count, std::vector<std::size_t> mode_cutoffs);

  static SpaceLayout uniform(std::size_t qubit_count, std::size_t mode_count, std::size_t cutoff);

  std::size_t qubit_count() const noexcept { return qubits_; }
  std::size_t mode_count() const noexcept { return cutoffs_.size(); }
  const std::vector<std::size_t>& mode_cutoffs() const noexcept { return cutoffs_; }
  std::size_t cutoff(std::size_t mode) const;

  std::size_t subsystem_count() const noexcept { return dims_.size(); }
  std::size_t subsystem_dim(std::size_t subsystem) const { return dims_.at(subsystem); }
  std::size_t stride(std::size_t subsystem) const { return strides_.at(subsystem); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  std::size_t qubit_subsystem(std::size_t qubit) const;
  std::size_t mode_subsystem(std::size_t mode) const;

  std::size_t total_dim() const noexcept { return total_; }

  std::size_t index(std::span<const std::size_t> digits) const;
  std::vector<std::size_t> digits(std::size_t index) const;

  bool operator==(const SpaceLayout& other) const {
    return qubits_ == other.qubits_ && cutoffs_ == other.cutoffs_;
  }

  std::string describe() const;

 private:
  std::size_t qubits_;
  std::vector<std::size_t> cutoffs_;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

/// Dense operator on the full space of a layout.
///
/// Immutable. Unitarity and Hermiticity are verified on first query and
/// cached together with the tolerance they were verified at; the cache is
/// shared between copies and guarded by std::call_once.
class TruncatedOperator {
 public:
  TruncatedOperator(SpaceLayout layout, Matrix matrix);

  static TruncatedOperator identity(const SpaceLayout& layout);

  const SpaceLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return layout_.total_dim(); }

  bool is_unitary() const;
  bool is_hermitian() const;
  double unitary_tolerance() const noexcept { return kUnitaryTolerance; }
  double hermitian_tolerance() const noexcept { return kHermitianTolerance; }

 private:
  struct Flags {
    std::once_flag unitary_once;
    std::once_flag hermitian_once;
    bool unitary = false;
    bool hermitian = false;
  };

  SpaceLayout layout_;
  Matrix matrix_;
  std::shared_ptr<Flags> flags_;
};

/// Operator acting on a subset of subsystems, identity elsewhere.
///
/// The local matrix is ordered by `targets` with the first target most
/// significant. Application to states never forms the full matrix.
class LocalOperator {
 public:
  LocalOperator(SpaceLayout layout, std::vector<std::size_t> targets, Matrix matrix);

  const SpaceLayout& layout() const noexcept { return layout_; }
  const std::vector<std::size_t>& targets() const noexcept { return targets_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  bool is_diagonal() const noexcept { return diagonal_; }

  /// Offsets of the local basis states inside the full index space.
  const std::vector<std::size_t>& local_offsets() const noexcept { return offsets_; }
  /// Full indices with every target digit equal to zero.
  const std::vector<std::size_t>& rest_bases() const noexcept { return bases_; }

  void apply(Vector& state) const;
  /// Multiplies every column: M ← U M.
  void apply_left(Matrix& m) const;
  /// ρ ← U ρ U†.
  void conjugate(Matrix& rho) const;

  LocalOperator adjoint() const;

 private:
  SpaceLayout layout_;
  std::vector<std::size_t> targets_;
  Matrix matrix_;
  bool diagonal_ = false;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> bases_;
};

// Plumbing.
TruncatedOperator compose(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator adjoint(const TruncatedOperator& a);
TruncatedOperator tensor_embed(const LocalOperator& op);
TruncatedOperator matrix_exponential(const TruncatedOperator& generator);
Matrix expm(const Matrix& generator);

TruncatedOperator operator*(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator operator+(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator operator-(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator operator*(cplx s, const TruncatedOperator& a);

// Single-mode matrices at cutoff d.
Matrix annihilation_matrix(std::size_t d);
Matrix number_matrix(std::size_t d);
Matrix parity_matrix(std::size_t d);
Matrix pauli_matrix(Pauli p);

namespace local {

LocalOperator annihilation(const SpaceLayout& layout, std::size_t mode);
LocalOperator creation(const SpaceLayout& layout, std::size_t mode);
LocalOperator number(const SpaceLayout& layout, std::size_t mode);
LocalOperator parity(const SpaceLayout& layout, std::size_t mode);
/// exp(iφ a†a).
LocalOperator phase_shift(const SpaceLayout& layout, std::size_t mode, double phi);
LocalOperator displacement(const SpaceLayout& layout, std::size_t mode, cplx alpha);
/// exp(angle (a_b a_a† − a_b† a_a)) on modes (a, b).
LocalOperator beam_splitter(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b,
                            double angle);
LocalOperator beam_splitter_5050(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b);
LocalOperator two_mode_swap(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b);
/// exp(iπ/2 (I − Z_q) a†a): identity on qubit |0⟩, parity on qubit |1⟩.
LocalOperator controlled_parity(const SpaceLayout& layout, std::size_t qubit, std::size_t mode);
LocalOperator pauli(const SpaceLayout& layout, std::size_t qubit, Pauli p);
/// R_σ(θ) = exp(iθσ).
LocalOperator qubit_rotation(const SpaceLayout& layout, std::size_t qubit, Pauli axis, double theta);

}  // namespace local

TruncatedOperator annihilation(const SpaceLayout& layout, std::size_t mode);
TruncatedOperator creation(const SpaceLayout& layout, std::size_t mode);
TruncatedOperator number(const SpaceLayout& layout, std::size_t mode);
TruncatedOperator parity(const SpaceLayout& layout, std::size_t mode);
TruncatedOperator phase_shift(const SpaceLayout& layout, std::size_t mode, double phi);
TruncatedOperator displacement(const SpaceLayout& layout, std::size_t mode, cplx alpha);
TruncatedOperator beam_splitter_5050(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b);
TruncatedOperator two_mode_swap(const SpaceLayout& layout, std::size_t mode_a, std::size_t mode_b);
TruncatedOperator controlled_parity(const SpaceLayout& layout, std::size_t qubit, std::size_t mode);
TruncatedOperator pauli(const SpaceLayout& layout, std::size_t qubit, Pauli p);
TruncatedOperator qubit_rotation(const SpaceLayout& layout, std::size_t qubit, Pauli axis, double theta);

/// Pure vector or density matrix over a layout.
///
/// `truncation_tail()` is the largest population sitting on the top Fock
/// level of any mode; it is recomputed on every construction and evolution
/// and never normalized away. `discarded_weight()` records probability
/// dropped when a distribution was cut at preparation time.
class HybridState {
 public:
  static HybridState pure(SpaceLayout layout, Vector psi, double discarded_weight = 0.0);
  static HybridState mixed(SpaceLayout layout, Matrix rho, double discarded_weight = 0.0);
  static HybridState basis(const SpaceLayout& layout, std::span<const std::size_t> digits);

  const SpaceLayout& layout() const noexcept { return layout_; }
  bool is_pure() const noexcept { return pure_; }
  const Vector& vector() const;
  const Matrix& density() const;
  Matrix to_density() const;
  HybridState as_mixed() const;

  double trace() const;
  RealVector populations() const;
  double truncation_tail() const noexcept { return tail_; }
  double discarded_weight() const noexcept { return discarded_; }

  cplx expectation(const Matrix& op) const;
  cplx expectation(const TruncatedOperator& op) const;

  HybridState evolved(const TruncatedOperator& u) const;
  HybridState evolved(const LocalOperator& u) const;
  HybridState normalized() const;

  /// Reduced 2×2 density matrix of one qubit.
  Matrix reduced_qubit(std::size_t qubit) const;

  /// Throws StateError unless trace is within `trace_tol` of one and, for
  /// density matrices, Hermitian to 1e-12 with eigenvalues ≥ −1e-10.
  void validate(double trace_tol = 1e-8) const;

 private:
  HybridState(SpaceLayout layout, bool pure, Vector psi, Matrix rho, double discarded);
  void refresh_tail();

  SpaceLayout layout_;
  bool pure_;
  Vector psi_;
  Matrix rho_;
  double tail_ = 0.0;
  double discarded_ = 0.0;
};

/// a ⊗ b; requires `a` to carry no modes or `b` to carry no qubits so the
/// qubits-first ordering is preserved.
HybridState tensor_product(const HybridState& a, const HybridState& b);

/// Conditional state ⟨bra|_q ψ (or ⟨bra|ρ|bra⟩) on the layout without qubit q.
/// Unnormalized; its trace is the branch probability.
HybridState project_qubit(const HybridState& state, std::size_t qubit, const Vector& bra);

/// Traces out every qubit, leaving a mode-only state.
HybridState trace_out_qubits(const HybridState& state);

/// |+⟩ = (|0⟩ + |1⟩)/√2 and |−⟩.
Vector plus_state();
Vector minus_state();

}  // namespace tqp

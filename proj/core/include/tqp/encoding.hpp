#pragma once

// Two-qumode parity (TQP) logical qubits and their gates.
//
// Logical qubit k (0-based) lives on modes 2k and 2k+1. Z_L is the parity of
// mode 2k+1 and X_L the swap of the pair; |0_L⟩ = |2m+1⟩|2n⟩, |1_L⟩ the
// swapped state. Gate circuits act on one shared auxiliary qubit, prepared in
// |+⟩ and returned to |+⟩ by every gate.
//
//   U_Z(θ)  = Ĉ R_X(θ) Ĉ                       -> e^{iθ Z_L}
//   U_X(θ)  = B† Ĉ R_X(θ) Ĉ B                  -> e^{iθ X_L}
//   U_ZZ(θ) = Ĉ_l Ĉ_k R_X(θ) Ĉ_k Ĉ_l            -> e^{iθ Z_L ⊗ Z_L}
//
// Products are written right to left; GateCircuit stores them in time order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tqp/fock.hpp"

namespace tqp {

struct LogicalQubitRef {
  std::size_t index = 0;
  std::size_t ancilla = 0;

  std::size_t mode_a() const noexcept { return 2 * index; }
  std::size_t mode_b() const noexcept { return 2 * index + 1; }
  /// Throws LayoutError unless both modes and the ancilla exist and the
  /// modes have equal cutoffs.
  void validate(const SpaceLayout& layout) const;
};

TruncatedOperator logical_z(const SpaceLayout& layout, const LogicalQubitRef& ref);
TruncatedOperator logical_x(const SpaceLayout& layout, const LogicalQubitRef& ref);

/// Ordered product of local operators, first element applied first.
class GateCircuit {
 public:
  explicit GateCircuit(SpaceLayout layout) : layout_(std::move(layout)) {}

  const SpaceLayout& layout() const noexcept { return layout_; }
  const std::vector<LocalOperator>& operations() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }

  void append(LocalOperator op);
  void append(const GateCircuit& other);

  void apply(Vector& psi) const;
  void apply(Matrix& rho) const;
  HybridState apply(const HybridState& state) const;

  GateCircuit adjoint() const;
  TruncatedOperator to_operator() const;

 private:
  SpaceLayout layout_;
  std::vector<LocalOperator> ops_;
};

/// Two-mode unitary V defining the Q^V bases; the identity gives Q^Fock.
class EncodingVariant {
 public:
  static EncodingVariant identity() { return EncodingVariant(); }
  /// Throws std::invalid_argument unless `two_mode_unitary` is unitary to 1e-10.
  explicit EncodingVariant(Matrix two_mode_unitary);

  bool is_identity() const noexcept { return !v_.has_value(); }
  const Matrix& matrix() const;
  /// V on the mode pair of `ref`.
  LocalOperator on(const SpaceLayout& layout, const LogicalQubitRef& ref) const;

 private:
  EncodingVariant() = default;
  std::optional<Matrix> v_;
};

/// V O V† with V acting on the mode pair of `ref`.
TruncatedOperator variant_conjugate(const EncodingVariant& variant, const LogicalQubitRef& ref,
                                    const TruncatedOperator& op);

GateCircuit gate_uz(const SpaceLayout& layout, const LogicalQubitRef& ref, double theta,
                    const EncodingVariant& variant = EncodingVariant::identity());
GateCircuit gate_ux(const SpaceLayout& layout, const LogicalQubitRef& ref, double theta,
                    const EncodingVariant& variant = EncodingVariant::identity());
GateCircuit gate_uzz(const SpaceLayout& layout, const LogicalQubitRef& k, const LogicalQubitRef& l, double theta);

/// cosθ I + i sinθ O for an involution O. Throws if ‖O² − I‖_max > 1e-10.
TruncatedOperator exponential_hermitian_unitary(const TruncatedOperator& o, double theta);
Matrix exponential_hermitian_unitary(const Matrix& o, double theta);

/// Fidelity ⟨+|ρ_q|+⟩ of one qubit with |+⟩.
double plus_fidelity(const HybridState& state, std::size_t qubit);

struct MeasurementBranch {
  int outcome = 0;  // +1 even parity, −1 odd parity
  double probability = 0.0;
  /// Normalized post-measurement state, ancilla reset to |+⟩. Empty when
  /// the branch probability is below 1e-12.
  std::optional<HybridState> post_state;
};

/// Nondemolition parity measurement of `mode`: Ĉ, then the ancilla is
/// measured in the X basis (Hadamard followed by a Z-basis projection).
/// Requires the ancilla in |+⟩ to 1e-10.
std::vector<MeasurementBranch> parity_measurement_branches(const HybridState& state, std::size_t ancilla,
                                                           std::size_t mode);
/// Born-rule sample of one branch.
MeasurementBranch parity_measurement(const HybridState& state, std::size_t ancilla, std::size_t mode,
                                     std::mt19937_64& rng);
/// Forced outcome; throws StateError if its probability is below 1e-12.
MeasurementBranch parity_measurement_forced(const HybridState& state, std::size_t ancilla, std::size_t mode,
                                            int outcome);

/// Inserts a qubit in state `qubit_state` at position `position` of the
/// qubit list.
HybridState insert_qubit(const HybridState& state, std::size_t position, const Vector& qubit_state);

}  // namespace tqp

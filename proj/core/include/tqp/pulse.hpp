#pragma once

// First-order hybrid dynamics H = ν a†a + νη σ_A (a + a†) and the pulse
// sequence that approximates exp(−i 64η² Z_A (a†a + ½)).
//
// Space: one auxiliary qubit (subsystem 0) and one mode. Rotations are ideal
// and instantaneous, R_σ(θ) = exp(iθσ). Time is in units of 1/ν.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "tqp/fock.hpp"

namespace tqp {

struct HybridParams {
  double nu = 1.0;
  double eta = 0.0;
  Pauli coupling_axis = Pauli::Z;

  /// Throws std::invalid_argument for η < 0, η > 0.2 or ν ≤ 0.
  void validate() const;
  /// True when η exceeds 0.05, outside the comfortable Lamb-Dicke range.
  bool outside_lamb_dicke() const noexcept { return eta > 0.05; }
};

SpaceLayout hybrid_layout(std::size_t cutoff);

/// Full H on the truncated hybrid space.
Matrix hybrid_hamiltonian(const HybridParams& params, std::size_t cutoff);
/// ν a†a on the hybrid space.
Matrix bare_hamiltonian(const HybridParams& params, std::size_t cutoff);

/// Σ_± |±⟩⟨±|_σ ⊗ U_±(t) with
/// U_±(t) = e^{iη²(νt − sin νt)} e^{−iνt a†a} D(∓η(e^{iνt} − 1)).
TruncatedOperator exact_free_propagator(const HybridParams& params, double t, std::size_t cutoff);

struct FreeEvolution {
  double duration = 0.0;
};
struct QubitRotation {
  Pauli axis = Pauli::X;
  double angle = 0.0;
};
/// Evolution meant to act as bare ν a†a. flip_interval = 0 uses the bare
/// propagator directly; δt > 0 realizes it by flipping the qubit every δt
/// under the full H.
struct WaitingPeriod {
  double duration = 0.0;
  double flip_interval = 0.0;
};
/// Ideal instantaneous e^{iφ a†a}.
struct ModePhase {
  double phi = 0.0;
};

using Segment = std::variant<FreeEvolution, QubitRotation, WaitingPeriod, ModePhase>;

class PulseSchedule {
 public:
  void append(Segment s);
  void append(const PulseSchedule& other, std::size_t times = 1);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t size() const noexcept { return segments_.size(); }
  double total_time() const;

  /// Prefix of the schedule up to time t; a straddling segment is shortened.
  PulseSchedule truncated(double t) const;

  std::string to_json() const;
  static PulseSchedule from_json(const std::string& text);

 private:
  std::vector<Segment> segments_;
};

/// Duration of one sequence, 18π/ν.
double sequence_time(const HybridParams& params);

/// The 4×(rotation, free evolution, rotation) block followed by a π/(2ν)
/// waiting period, raised to the fourth power, repeated `repetitions` times.
PulseSchedule build_h2_sequence(const HybridParams& params, std::size_t repetitions, double flip_interval = 0.0);

/// Unitary of a schedule, products accumulated in time order.
Matrix schedule_unitary(const HybridParams& params, const PulseSchedule& schedule, std::size_t cutoff);

/// exp(−i 64η² Z_A (a†a + ½)) raised to `repetitions`.
Matrix h2_target(const HybridParams& params, std::size_t cutoff, std::size_t repetitions = 1);

struct CouplingInfo {
  double lambda_nominal = 0.0;   // (32/9) η² ν
  double lambda_schedule = 0.0;  // 64η² per 18π/ν
  double sequence_time = 0.0;
  double total_time = 0.0;
  double nominal_gate_time = 0.0;  // 9π/(64 η² ν)
  double exact_repetitions = 0.0;  // π/(128 η²)
  std::size_t repetitions_for_eta = 0;
};

CouplingInfo effective_coupling(const HybridParams& params, std::size_t repetitions);
/// Repetitions with 64η²·reps = π/2.
double exact_repetitions(double eta);
/// η with 64η²·reps = π/2.
double eta_for_repetitions(std::size_t repetitions);

/// Flip-cancelled waiting period: blocks R_X(π/2) e^{−iδtH} R_X(−π/2) e^{−iδtH}
/// covering `duration`, with a shortened final block for any remainder.
Matrix waiting_period_flip_cancellation(const HybridParams& params, double duration, double flip_interval,
                                        std::size_t cutoff);

/// Phase-gauged operator-norm distance on the columns with n ≤ n_max (both
/// qubit states).
double subspace_residual(const Matrix& u, const Matrix& v, std::size_t cutoff, std::size_t n_max);
std::vector<std::size_t> low_number_columns(std::size_t cutoff, std::size_t n_max);

struct FlipReport {
  double residual = 0.0;  // against e^{−i duration ν a†a}
  std::size_t blocks = 0;
};
FlipReport flip_cancellation_residual(const HybridParams& params, double duration, double flip_interval,
                                      std::size_t cutoff, std::size_t n_max);

struct H2Report {
  double eta = 0.0;
  std::size_t cutoff = 0;
  std::size_t n_max = 0;
  double residual = 0.0;          // subspace operator norm, phase gauged
  double offdiag_block = 0.0;     // ‖⟨0|U|1⟩‖ + ‖⟨1|U|0⟩‖ on the subspace
  double residual_n0 = 0.0;       // phase-gauged column error at n = 0
  double residual_nmax = 0.0;     // phase-gauged column error at n = n_max
  double unitarity_defect = 0.0;
};

/// One sequence against exp(−i64η² Z_A(a†a + ½)). n_max defaults to d − 6.
H2Report h2_residual(const HybridParams& params, std::size_t cutoff, std::size_t n_max = 0);

/// Log-log slope of the residual between two η values.
double residual_exponent(double eta_a, double residual_a, double eta_b, double residual_b);

/// reps sequences, the ancilla compensation exp(+iπ/4 Z_A) for the ½ term,
/// then the mode frame phase exp(iπ/2 a†a). Equals exp(iπ/2 (I − Z_A) a†a)
/// to the order of the sequence error.
PulseSchedule engineered_controlled_parity_schedule(const HybridParams& params, std::size_t repetitions);
Matrix engineered_controlled_parity(const HybridParams& params, std::size_t repetitions, std::size_t cutoff);

}  // namespace tqp

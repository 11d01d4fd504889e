#pragma once

// Multi-qubit circuits on TQP logical qubits, run on a pure basis pair or on
// the thermal mixed state, plus a 2^K qubit-space reference.
//
// A step holds angle lists (phi, theta, gamma) of lengths K, K, K−1 and
// implements (Π e^{iφ_k Z_k})(Π e^{iθ_k X_k})(Π e^{iγ_j Z_j Z_{j+1}}): the
// ZZ layer acts first, then X, then Z. Steps run in list order. The readout
// is A = Tr(ρ ⊗_k (I + Z_{L_k})/2).

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tqp/fock.hpp"
#include "tqp/thermal.hpp"

namespace tqp {

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CircuitStep {
  std::vector<double> phi;
  std::vector<double> theta;
  std::vector<double> gamma;
};

struct LogicalCircuit {
  std::size_t qubits = 1;
  std::vector<CircuitStep> steps;

  void validate() const;
};

/// Angles uniform in [−π, π).
LogicalCircuit random_circuit(std::size_t qubits, std::size_t steps, std::mt19937_64& rng);

enum class RunMode { Pure, Mixed };

struct ComputationResult {
  double a = 0.0;
  RunMode mode = RunMode::Pure;
  std::vector<std::pair<std::size_t, std::size_t>> basis;  // (m_k, n_k), pure runs only
  std::uint64_t seed = 0;
  std::size_t cutoff = 0;
  double truncation_tail = 0.0;
  /// Initial probability outside the complete number blocks, mixed runs only.
  double discarded_weight = 0.0;
  /// Smallest ancilla fidelity with |+⟩ observed after any gate.
  double min_ancilla_fidelity = 1.0;
  /// Population outside the initial basis pairs at the end, pure runs only.
  double leakage = 0.0;
};

/// Largest state-vector dimension run_pure accepts.
inline constexpr std::size_t kPureDimensionBudget = 1u << 16;
/// Default cutoffs per mode.
inline constexpr std::size_t kMixedCutoff = 8;
std::size_t default_pure_cutoff(std::size_t qubits);

/// |Ψ₀⟩ = |+⟩_A ⊗_k |2m_k+1⟩|2n_k⟩. Requires 2m+1+2n ≤ d−1 for each pair,
/// the block on which the truncated beam splitter is exact.
ComputationResult run_pure(const LogicalCircuit& circuit, const std::vector<std::pair<std::size_t, std::size_t>>& basis,
                           std::size_t cutoff = 0);

enum class MixedBackend { Sectors, Dense };

/// ρ₀ = |+⟩⟨+|_A ⊗_k ρ_odd ⊗ ρ_even restricted to the complete blocks
/// N_k ≤ d−1 and renormalized. The sector backend keeps ρ block diagonal in
/// the per-qubit excitation numbers; the dense backend evolves the full
/// density matrix and is limited to small spaces.
ComputationResult run_mixed(const LogicalCircuit& circuit, double mean_excitation, std::size_t cutoff = kMixedCutoff,
                            MixedBackend backend = MixedBackend::Sectors);

/// A from 2×2 Pauli algebra on |0…0⟩, no qumodes.
double qubit_space_oracle(const LogicalCircuit& circuit);

// Circuit files: {"version": 1, "qubits": K, "steps": [{"phi": [...], "theta": [...], "gamma": [...]}]}
LogicalCircuit parse_circuit_json(const std::string& text);
std::string circuit_to_json(const LogicalCircuit& circuit);
LogicalCircuit load_circuit(const std::string& path);
void save_circuit(const LogicalCircuit& circuit, const std::string& path);

}  // namespace tqp

#pragma once

// Thermal, parity-projected and TQP initial states; entropy bookkeeping.
//
// Entropies are in bits. Landauer energies are entropy differences in units
// of k_B T ln 2, so no temperature enters.

#include <cstddef>
#include <stdexcept>
#include <utility>

#include "tqp/fock.hpp"

namespace tqp {

class ThermalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kThermalTail = 1e-8;
inline constexpr std::size_t kDefaultCutoff = 20;

struct ThermalSpec {
  double mean_excitation = 0.0;
  std::size_t cutoff = kDefaultCutoff;

  /// e^{−β} = ⟨n⟩/(⟨n⟩+1). Zero for the vacuum.
  double boltzmann_ratio() const;
  /// +∞ for ⟨n⟩ = 0.
  double beta() const;
  void validate() const;

  /// Smallest cutoff (≥ min_cutoff) with q^{d−1} < tail, which bounds the
  /// thermal tail and the tails of both parity-projected factors.
  static ThermalSpec with_tail(double mean_excitation, double tail = kThermalTail,
                               std::size_t min_cutoff = 2);
};

/// Σ_{n≥d} p_n for the untruncated geometric distribution.
double thermal_tail(double mean_excitation, std::size_t cutoff);

/// Unnormalized p_n = (1−q) q^n for n < d.
RealVector thermal_populations(double mean_excitation, std::size_t cutoff);
/// (1−q²) q^{2k} placed on |2k⟩ or |2k+1⟩, truncated at d and not renormalized.
RealVector even_populations(double mean_excitation, std::size_t cutoff);
RealVector odd_populations(double mean_excitation, std::size_t cutoff);

/// Single-mode thermal state, renormalized. Throws when the tail is ≥ 1e-8.
HybridState thermal_state(const ThermalSpec& spec);

/// (Π ρ Π)/p with Π = (I ± P_mode)/2. Sign must be +1 or −1.
std::pair<HybridState, double> parity_project(const HybridState& state, std::size_t mode, int parity_sign);

/// ρ_odd ⊗ ρ_even on two modes of equal cutoff (the logical |0_L⟩).
HybridState tqp_initial_state(const ThermalSpec& spec);

/// −Σ λ log₂ λ over eigenvalues above 1e-14.
double von_neumann_entropy(const HybridState& state);
double entropy_bits(const RealVector& eigenvalues);

double n_tilde(double mean_excitation);
/// (n+1)log₂(n+1) − n log₂ n.
double thermal_entropy(double mean_excitation);
/// 2(ñ+1)log₂(ñ+1) − 2ñ log₂ ñ.
double tqp_entropy(double mean_excitation);

struct EntropyReport {
  double mean_excitation = 0.0;
  std::size_t cutoff = 0;
  double s_thermal = 0.0;
  double s_tqp = 0.0;
  double s_tqp_spectral = 0.0;
  double n_tilde = 0.0;
  bool crossover = false;
  double landauer_pure = 0.0;
  double landauer_tqp = 0.0;
};

/// Closed forms plus the spectral entropy of ρ₀; throws ThermalError if the
/// two disagree beyond 1e-6.
EntropyReport entropy_report(const ThermalSpec& spec);

/// Root of S(ρ₀) − S(ρ_th) by bisection on [lo, hi].
double entropy_crossover(double lo = 0.1, double hi = 2.0, double tol = 1e-4);

}  // namespace tqp

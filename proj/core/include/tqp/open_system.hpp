#pragma once

// Damped-mode dynamics: Lindblad integration through pulse schedules,
// quantum-jump unravelling, the parity-measurement fidelity sweep and the
// ε_TQP / ε_cool error estimates.
//
// Master equation, rates in units of ν:
//   ρ̇ = −i[H, ρ] + κ(N_th + 1) D[a]ρ + κ N_th D[a†]ρ,   κ = ν/Q,
//   D[O]ρ = OρO† − ½{O†O, ρ}.
// States live on hybrid_layout(d) (ancilla + one mode) or on a single mode.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tqp/fock.hpp"
#include "tqp/pulse.hpp"

namespace tqp {

struct NoiseParams {
  double nu = 1.0;
  double eta = 0.0;
  double q = std::numeric_limits<double>::infinity();
  double n_th = 0.0;
  double gamma_dc = 0.0;
  double gamma_dp = 0.0;
  double delta = 0.0;
  double omega = 0.0;

  void validate() const;
  double kappa() const noexcept { return nu / q; }
  bool closed() const noexcept { return kappa() == 0.0; }
};

/// Right-hand side for explicit H and mode annihilation operator `a`.
Matrix lindblad_rhs(const Matrix& rho, const Matrix& h, const Matrix& a, const NoiseParams& noise);

/// Superoperator of the right-hand side acting on column-major vec(ρ).
Matrix lindblad_superoperator(const Matrix& h, const Matrix& a, const NoiseParams& noise);

struct MasterOptions {
  double dt = 1e-2;
  bool certify = true;
  double certify_tolerance = 1e-6;
  int max_halvings = 3;
  /// Largest D² for which RK4 steps are taken as powers of the step
  /// superoperator; larger spaces step the density matrix directly.
  std::size_t superoperator_limit = 2500;
};

struct MasterResult {
  HybridState state;
  double dt = 0.0;
  int halvings = 0;
  /// Trace distance between the last two step sizes; 0 without certification.
  double certification_distance = 0.0;
  double trace_error = 0.0;
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-step RK4 through the schedule; rotations and mode phases are
/// instantaneous conjugations. With certification the run is repeated at
/// dt/2 (and further halvings) until consecutive results differ by less than
/// the tolerance in trace distance; throws ConvergenceError otherwise.
MasterResult evolve_master(const HybridState& state, const PulseSchedule& schedule, const HybridParams& params,
                           const NoiseParams& noise, const MasterOptions& options = {});

struct TrajectoryOptions {
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  /// Jump-time resolution inside a segment.
  double substep = 0.05;
  std::size_t threads = 1;
};

struct TrajectoryResult {
  Matrix mean_density;
  double mean_jumps = 0.0;
  double jump_stddev = 0.0;
  std::size_t trajectories = 0;
};

/// Waiting-time Monte-Carlo wavefunction method under
/// H_eff = H − (i/2)κ[(N_th+1) a†a + N_th a a†]. Mixed inputs are sampled
/// from their eigen-decomposition. Trajectory i draws from its own stream
/// seeded by splitmix64(seed, i); results are reduced in index order.
TrajectoryResult jump_unravelling(const HybridState& state, const PulseSchedule& schedule, const HybridParams& params,
                                  const NoiseParams& noise, const TrajectoryOptions& options);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

/// (2N_th⟨n⟩ + N_th + ⟨n⟩) κ.
double jump_rate(double mean_excitation, const NoiseParams& noise);
/// 1 − Tr(e^{−iH_eff dt} ρ e^{iH_eff† dt}) for a state on hybrid_layout or a single mode.
double short_time_jump_probability(const HybridState& state, const HybridParams& params, const NoiseParams& noise,
                                   double dt);

struct FidelityConfig {
  std::size_t repetitions = 0;  // 0 selects the exact controlled parity
  double eta = 0.0;
};

/// The three (repetitions, η) configurations 50, 100 and 200, η chosen so 64η²·reps = π/2.
std::vector<FidelityConfig> figure3_configs();

struct FidelityPoint {
  double mean_excitation = 0.0;
  double fidelity = 0.0;
  FidelityConfig config;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double baseline = 0.0;
  std::size_t cutoff = 0;
};

inline constexpr double kFidelityTail = 1e-6;
inline constexpr double kDegenerateBranch = 1e-9;

/// |+⟩_A ⊗ ρ_th through the controlled parity, ancilla measured in the X
/// basis; F = Tr(ρ₊(I+P)) Tr(ρ₋(I−P))/4. A branch with probability below
/// 1e-9 contributes a factor 1. Without noise the gate is applied as a
/// unitary; with noise the schedule is integrated by evolve_master.
FidelityPoint figure3_fidelity(double mean_excitation, const FidelityConfig& config,
                               const std::optional<NoiseParams>& noise = std::nullopt, double tail = kFidelityTail,
                               std::size_t cutoff_override = 0);

/// (2N_th⟨n⟩ + N_th + ⟨n⟩) · 9π/(64η²Q).
double epsilon_tqp(const NoiseParams& noise, double mean_excitation, double eta);
/// 9π/(64η²ν).
double tqp_gate_time(double eta, double nu = 1.0);

struct EpsilonCheck {
  double closed_form = 0.0;
  double trajectory_mean_jumps = 0.0;
  double relative_difference = 0.0;
  double time = 0.0;
  std::size_t cutoff = 0;
  std::size_t trajectories = 0;
};

/// Mean jump count of trajectories started from |+⟩ ⊗ ρ_th and run through
/// the H₂ pulse sequence for the nominal gate time 9π/(64η²ν).
EpsilonCheck epsilon_tqp_trajectories(const NoiseParams& noise, double mean_excitation, double eta,
                                      std::size_t cutoff, const TrajectoryOptions& options);

// ---------------------------------------------------------------- cooling

/// 4η²ν²Γ_dc Γ_dp ΔΩ² / [ν(Γ_dp² + Δ² + Ω²)(Γ_dc(Γ_dp² + Δ²) + Γ_dp Ω²)].
double cooling_rate(double eta, double nu, double gamma_dc, double gamma_dp, double delta, double omega);

struct CoolingReport {
  double gamma_c = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double scaling = 0.0;  // η²ν Γ_dc/Γ_dp
  double ratio = 0.0;    // gamma_c / scaling
  double eps_cool = 0.0;
  double eps_tqp = 0.0;
  double eps_ratio = 0.0;  // eps_tqp / eps_cool
  bool tqp_favoured = false;  // ⟨n⟩ ≪ Γ_dp/Γ_dc, taken as ⟨n⟩ < 0.1 Γ_dp/Γ_dc
  std::size_t grid_points = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double log_lower = -3.0;
  double log_upper = 4.0;
};

/// Maximizes the cooling rate over (Δ, Ω) on a log grid in
/// [10^log_lower, 10^log_upper]ν, refined by Nelder-Mead in log variables.
/// Throws ConvergenceError if the simplex does not converge.
CoolingReport cooling_comparison(const NoiseParams& noise, double mean_excitation);

}  // namespace tqp

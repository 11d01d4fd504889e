#pragma once

// Collective phase and squeezing noise on a two-mode pair, commutation with
// the TQP logical operators, and the absence of a pure-state subspace that
// is invariant under both noises.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tqp/fock.hpp"

namespace tqp {

enum class NoiseKind { Phase, Squeeze };

inline constexpr double kSqueezeTail = 1e-6;

/// Probability that E_S(ξ)|n⟩ would leave levels below d, maximized over
/// n ≤ level, estimated against a reference with cutoff 3d.
double squeeze_tail(double xi, std::size_t cutoff, std::size_t level);

/// Largest level such that every |n⟩ with n ≤ level keeps its squeeze tail
/// below 1e-6 at this cutoff; nullopt if even the vacuum does not.
std::optional<std::size_t> squeeze_safe_level(double xi, std::size_t cutoff);

/// d/3, the default number bound for test states.
inline std::size_t default_test_level(std::size_t cutoff) { return cutoff / 3; }

/// E_P(φ) = e^{iφa†a} ⊗ e^{iφa†a}, E_S(ξ) = e^{ξ(a² − a†²)} ⊗ e^{ξ(a² − a†²)}
/// on a layout of exactly two modes. Squeezing requires |ξ| ≤ 0.3 and throws
/// if states with n ≤ test_level per mode have a tail of 1e-6 or more
/// (test_level defaults to d/3).
TruncatedOperator collective_noise(NoiseKind kind, double parameter, const SpaceLayout& layout,
                                   std::optional<std::size_t> test_level = std::nullopt);

/// Two-mode column indices with n₁ + n₂ ≤ max_total.
std::vector<std::size_t> tail_safe_columns(const SpaceLayout& layout, std::size_t max_total);

/// ‖[E, L]‖_max on the columns with n₁ + n₂ ≤ max_total (default d/3).
double commutation_check(const TruncatedOperator& noise, const TruncatedOperator& logical,
                         std::optional<std::size_t> max_total = std::nullopt);

struct DfsLevel {
  std::size_t excitation = 0;
  std::size_t subspace_dim = 0;
  std::size_t null_dim = 0;
  double smallest_singular = 0.0;
  double largest_singular = 0.0;
  double random_probe_min = 0.0;  // smallest ‖Gψ‖ over random unit ψ in the subspace
};

struct DfsReport {
  std::size_t cutoff = 0;
  double threshold = 1e-8;  // relative to the largest singular value
  std::vector<DfsLevel> levels;
  bool nonexistence_confirmed = false;
};

/// For each M ≤ m_max, the map G = a₁² − a₁†² + a₂² − a₂†² from the
/// M-excitation subspace into the full two-mode space and its null space.
/// Requires m_max + 2 < d.
DfsReport dfs_nonexistence(std::size_t m_max, std::size_t cutoff, std::uint64_t seed = 1);

struct NsCheck {
  std::string noise;
  double parameter = 0.0;
  std::string logical;
  double residual = 0.0;
  std::size_t max_total = 0;  // number bound of the checked columns
};

struct NsReport {
  std::size_t cutoff = 0;
  std::vector<NsCheck> checks;
  NsCheck negative_control;
  DfsReport dfs;
  double tolerance = 1e-8;
  double negative_threshold = 0.1;
  bool passed = false;
};

/// All four commutators over the phase and squeeze grids, the negative
/// control [E_P(0.7), I ⊗ (a + a†)] and the DFS scan. Squeeze checks use
/// min(d/3, squeeze_safe_level) as the number bound; a squeeze parameter
/// without any safe level throws.
NsReport ns_report(const std::vector<double>& phis, const std::vector<double>& xis, std::size_t cutoff,
                   std::size_t m_max, std::uint64_t seed = 1);

std::string ns_report_json(const NsReport& report);

}  // namespace tqp

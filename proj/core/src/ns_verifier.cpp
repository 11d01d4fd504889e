#include "tqp/ns_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace tqp {

namespace {

Matrix squeeze_matrix(double xi, std::size_t d) {
  const Matrix a = annihilation_matrix(d);
  const Matrix ad = a.adjoint();
  return expm(xi * (a * a - ad * ad));
}

void require_two_modes(const SpaceLayout& layout) {
  if (layout.qubit_count() != 0 || layout.mode_count() != 2 || layout.cutoff(0) != layout.cutoff(1)) {
    throw LayoutError("collective noise needs exactly two modes of equal cutoff, got " + layout.describe());
  }
}

// Per-level tails of E_S(ξ)|n⟩ beyond the cutoff, n < cutoff.
std::vector<double> squeeze_tails(double xi, std::size_t cutoff) {
  const std::size_t big_dim = 3 * cutoff;
  const Matrix big = squeeze_matrix(xi, big_dim);
  std::vector<double> tails(cutoff);
  for (std::size_t n = 0; n < cutoff; ++n) {
    tails[n] = big.col(static_cast<Eigen::Index>(n)).tail(static_cast<Eigen::Index>(big_dim - cutoff)).squaredNorm();
  }
  return tails;
}

}  // namespace

double squeeze_tail(double xi, std::size_t cutoff, std::size_t level) {
  const auto tails = squeeze_tails(xi, cutoff);
  double worst = 0.0;
  for (std::size_t n = 0; n <= std::min(level, cutoff - 1); ++n) worst = std::max(worst, tails[n]);
  return worst;
}

std::optional<std::size_t> squeeze_safe_level(double xi, std::size_t cutoff) {
  const auto tails = squeeze_tails(xi, cutoff);
  std::optional<std::size_t> level;
  for (std::size_t n = 0; n < cutoff && tails[n] < kSqueezeTail; ++n) level = n;
  return level;
}

TruncatedOperator collective_noise(NoiseKind kind, double parameter, const SpaceLayout& layout,
                                   std::optional<std::size_t> test_level) {
  require_two_modes(layout);
  const std::size_t d = layout.cutoff(0);
  Matrix single;
  if (kind == NoiseKind::Phase) {
    single = local::phase_shift(SpaceLayout(0, {d}), 0, parameter).matrix();
  } else {
    if (std::abs(parameter) > 0.3) throw std::invalid_argument("collective_noise: |xi| must not exceed 0.3");
    const std::size_t level = test_level.value_or(default_test_level(d));
    const double tail = squeeze_tail(parameter, d, level);
    if (!(tail < kSqueezeTail)) {
      throw std::invalid_argument("collective_noise: squeeze tail " + std::to_string(tail) + " for n <= " +
                                  std::to_string(level) + " exceeds 1e-6 at cutoff " + std::to_string(d));
    }
    single = squeeze_matrix(parameter, d);
  }
  return {layout, kron(single, single)};
}

std::vector<std::size_t> tail_safe_columns(const SpaceLayout& layout, std::size_t max_total) {
  require_two_modes(layout);
  const std::size_t d = layout.cutoff(0);
  std::vector<std::size_t> cols;
  for (std::size_t n1 = 0; n1 < d; ++n1) {
    for (std::size_t n2 = 0; n2 < d; ++n2) {
      if (n1 + n2 <= max_total) cols.push_back(n1 * d + n2);
    }
  }
  return cols;
}

double commutation_check(const TruncatedOperator& noise, const TruncatedOperator& logical,
                         std::optional<std::size_t> max_total) {
  if (!(noise.layout() == logical.layout())) throw LayoutError("commutation_check: layout mismatch");
  const std::size_t bound = max_total.value_or(default_test_level(noise.layout().cutoff(0)));
  const auto cols = tail_safe_columns(noise.layout(), bound);
  const Matrix c = noise.matrix() * select_columns(logical.matrix(), cols) -
                   logical.matrix() * select_columns(noise.matrix(), cols);
  return max_abs(c);
}

DfsReport dfs_nonexistence(std::size_t m_max, std::size_t cutoff, std::uint64_t seed) {
  if (m_max + 2 >= cutoff) throw std::invalid_argument("dfs_nonexistence: need m_max + 2 < cutoff");
  const SpaceLayout layout(0, {cutoff, cutoff});
  const Matrix a1 = annihilation(layout, 0).matrix();
  const Matrix a2 = annihilation(layout, 1).matrix();
  const Matrix g = a1 * a1 - a1.adjoint() * a1.adjoint() + a2 * a2 - a2.adjoint() * a2.adjoint();

  DfsReport report;
  report.cutoff = cutoff;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  report.nonexistence_confirmed = true;
  for (std::size_t m = 0; m <= m_max; ++m) {
    std::vector<std::size_t> cols;
    for (std::size_t n1 = 0; n1 <= m; ++n1) cols.push_back(n1 * cutoff + (m - n1));
    const Matrix restricted = select_columns(g, cols);
    Eigen::JacobiSVD<Matrix> svd(restricted);
    const RealVector sv = svd.singularValues();
    DfsLevel level;
    level.excitation = m;
    level.subspace_dim = cols.size();
    level.largest_singular = sv(0);
    level.smallest_singular = sv(sv.size() - 1);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) < report.threshold * sv(0)) ++level.null_dim;
    }
    level.random_probe_min = std::numeric_limits<double>::infinity();
    for (int probe = 0; probe < 20; ++probe) {
      Vector psi(static_cast<Eigen::Index>(cols.size()));
      for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(normal(rng), normal(rng));
      psi.normalize();
      level.random_probe_min = std::min(level.random_probe_min, (restricted * psi).norm());
    }
    if (level.null_dim != 0) report.nonexistence_confirmed = false;
    report.levels.push_back(level);
  }
  return report;
}

NsReport ns_report(const std::vector<double>& phis, const std::vector<double>& xis, std::size_t cutoff,
                   std::size_t m_max, std::uint64_t seed) {
  NsReport r;
  r.cutoff = cutoff;
  const SpaceLayout layout(0, {cutoff, cutoff});
  const TruncatedOperator zl = parity(layout, 1);
  const TruncatedOperator xl = two_mode_swap(layout, 0, 1);
  auto add = [&](const char* noise, double p, const TruncatedOperator& e, std::size_t bound) {
    r.checks.push_back({noise, p, "Z_L", commutation_check(e, zl, bound), bound});
    r.checks.push_back({noise, p, "X_L", commutation_check(e, xl, bound), bound});
  };
  const std::size_t level = default_test_level(cutoff);
  for (double phi : phis) add("phase", phi, collective_noise(NoiseKind::Phase, phi, layout), level);
  for (double xi : xis) {
    const auto safe = squeeze_safe_level(xi, cutoff);
    if (!safe) throw std::invalid_argument("ns_report: no squeeze-safe level at cutoff " + std::to_string(cutoff));
    const std::size_t bound = std::min(level, *safe);
    add("squeeze", xi, collective_noise(NoiseKind::Squeeze, xi, layout, bound), bound);
  }

  const Matrix a2 = annihilation(layout, 1).matrix();
  const TruncatedOperator quad(layout, a2 + a2.adjoint());
  r.negative_control = {"phase", 0.7, "I(a+a^dag)",
                        commutation_check(collective_noise(NoiseKind::Phase, 0.7, layout), quad), level};
  r.dfs = dfs_nonexistence(m_max, cutoff, seed);

  r.passed = r.dfs.nonexistence_confirmed && r.negative_control.residual > r.negative_threshold;
  for (const auto& c : r.checks) r.passed = r.passed && c.residual <= r.tolerance;
  return r;
}

std::string ns_report_json(const NsReport& report) {
  using nlohmann::json;
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"noise", c.noise}, {"parameter", c.parameter}, {"logical", c.logical}, {"residual", c.residual},
                      {"max_total", c.max_total}});
  }
  json levels = json::array();
  for (const auto& l : report.dfs.levels) {
    levels.push_back({{"excitation", l.excitation},
                      {"subspace_dim", l.subspace_dim},
                      {"null_dim", l.null_dim},
                      {"smallest_singular", l.smallest_singular},
                      {"largest_singular", l.largest_singular},
                      {"random_probe_min", l.random_probe_min}});
  }
  json doc{{"cutoff", report.cutoff},
           {"tolerance", report.tolerance},
           {"commutators", checks},
           {"negative_control",
            {{"noise", report.negative_control.noise},
             {"parameter", report.negative_control.parameter},
             {"logical", report.negative_control.logical},
             {"residual", report.negative_control.residual},
             {"threshold", report.negative_threshold}}},
           {"dfs",
            {{"threshold_relative", report.dfs.threshold},
             {"levels", levels},
             {"nonexistence_confirmed", report.dfs.nonexistence_confirmed},
             {"note", "checked numerically for M <= m_max only"}}},
           {"passed", report.passed}};
  return doc.dump(2);
}

}  // namespace tqp

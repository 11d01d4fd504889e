#include "tqp/thermal.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tqp {

double ThermalSpec::boltzmann_ratio() const { return mean_excitation / (mean_excitation + 1.0); }

double ThermalSpec::beta() const {
  if (mean_excitation == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(boltzmann_ratio());
}

void ThermalSpec::validate() const {
  if (!std::isfinite(mean_excitation) || mean_excitation < 0.0) {
    throw ThermalError("ThermalSpec: mean excitation must be finite and non-negative");
  }
  if (cutoff < 2) throw ThermalError("ThermalSpec: cutoff must be at least 2");
}

ThermalSpec ThermalSpec::with_tail(double mean_excitation, double tail, std::size_t min_cutoff) {
  ThermalSpec spec{mean_excitation, std::max<std::size_t>(min_cutoff, 2)};
  spec.validate();
  const double q = spec.boltzmann_ratio();
  while (std::pow(q, static_cast<double>(spec.cutoff - 1)) >= tail) ++spec.cutoff;
  return spec;
}

double thermal_tail(double mean_excitation, std::size_t cutoff) {
  const double q = mean_excitation / (mean_excitation + 1.0);
  return std::pow(q, static_cast<double>(cutoff));
}

RealVector thermal_populations(double mean_excitation, std::size_t cutoff) {
  const double q = mean_excitation / (mean_excitation + 1.0);
  RealVector p(static_cast<Eigen::Index>(cutoff));
  double w = 1.0 - q;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    p(n) = w;
    w *= q;
  }
  return p;
}

namespace {

RealVector parity_populations(double mean_excitation, std::size_t cutoff, std::size_t first) {
  const double q = mean_excitation / (mean_excitation + 1.0);
  RealVector p = RealVector::Zero(static_cast<Eigen::Index>(cutoff));
  double w = 1.0 - q * q;
  for (std::size_t n = first; n < cutoff; n += 2) {
    p(static_cast<Eigen::Index>(n)) = w;
    w *= q * q;
  }
  return p;
}

HybridState diagonal_state(SpaceLayout layout, const RealVector& p, double discarded) {
  Matrix rho = Matrix::Zero(p.size(), p.size());
  rho.diagonal() = p.cast<cplx>();
  return HybridState::mixed(std::move(layout), std::move(rho), discarded);
}

}  // namespace

RealVector even_populations(double mean_excitation, std::size_t cutoff) {
  return parity_populations(mean_excitation, cutoff, 0);
}

RealVector odd_populations(double mean_excitation, std::size_t cutoff) {
  return parity_populations(mean_excitation, cutoff, 1);
}

HybridState thermal_state(const ThermalSpec& spec) {
  spec.validate();
  RealVector p = thermal_populations(spec.mean_excitation, spec.cutoff);
  const double kept = p.sum();
  if (1.0 - kept >= kThermalTail) {
    throw ThermalError("thermal_state: cutoff " + std::to_string(spec.cutoff) + " leaves tail " +
                       std::to_string(1.0 - kept) + " at <n> = " + std::to_string(spec.mean_excitation));
  }
  return diagonal_state(SpaceLayout(0, {spec.cutoff}), p / kept, 1.0 - kept);
}

std::pair<HybridState, double> parity_project(const HybridState& state, std::size_t mode, int parity_sign) {
  if (parity_sign != 1 && parity_sign != -1) throw std::invalid_argument("parity_project: sign must be +1 or -1");
  const SpaceLayout& layout = state.layout();
  const std::size_t d = layout.cutoff(mode);
  Matrix proj = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t n = 0; n < d; ++n) {
    const int parity = (n % 2 == 0) ? 1 : -1;
    if (parity == parity_sign) proj(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
  }
  const LocalOperator pi(layout, {layout.mode_subsystem(mode)}, proj);
  const double total = state.trace();
  HybridState projected = state.evolved(pi);
  const double p = projected.trace() / total;
  if (p < 1e-12) throw StateError("parity_project: outcome probability below 1e-12");
  return {projected.normalized(), p};
}

HybridState tqp_initial_state(const ThermalSpec& spec) {
  spec.validate();
  const RealVector odd = odd_populations(spec.mean_excitation, spec.cutoff);
  const RealVector even = even_populations(spec.mean_excitation, spec.cutoff);
  const double so = odd.sum();
  const double se = even.sum();
  if (1.0 - so >= kThermalTail || 1.0 - se >= kThermalTail) {
    throw ThermalError("tqp_initial_state: cutoff " + std::to_string(spec.cutoff) + " too small for <n> = " +
                       std::to_string(spec.mean_excitation));
  }
  const RealVector a = odd / so;
  const RealVector b = even / se;
  RealVector p(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) p.segment(i * b.size(), b.size()) = a(i) * b;
  return diagonal_state(SpaceLayout(0, {spec.cutoff, spec.cutoff}), p, 1.0 - so * se);
}

double entropy_bits(const RealVector& eigenvalues) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (l > 1e-14) s -= l * std::log2(l);
  }
  return s;
}

double von_neumann_entropy(const HybridState& state) {
  if (state.is_pure()) return 0.0;
  const RealVector eig = hermitian_eigenvalues(state.density());
  if (eig.size() > 0 && eig.minCoeff() < -1e-10) {
    throw StateError("von_neumann_entropy: density matrix is not positive semidefinite");
  }
  return entropy_bits(eig);
}

double n_tilde(double mean_excitation) {
  return mean_excitation * mean_excitation / (2.0 * mean_excitation + 1.0);
}

namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double thermal_entropy(double mean_excitation) {
  return xlog2x(mean_excitation + 1.0) - xlog2x(mean_excitation);
}

double tqp_entropy(double mean_excitation) {
  const double nt = n_tilde(mean_excitation);
  return 2.0 * xlog2x(nt + 1.0) - 2.0 * xlog2x(nt);
}

EntropyReport entropy_report(const ThermalSpec& spec) {
  spec.validate();
  EntropyReport r;
  r.mean_excitation = spec.mean_excitation;
  r.cutoff = spec.cutoff;
  r.n_tilde = n_tilde(spec.mean_excitation);
  r.s_thermal = thermal_entropy(spec.mean_excitation);
  r.s_tqp = tqp_entropy(spec.mean_excitation);

  // ρ₀ is a product of two diagonal factors, so its spectrum is the product
  // of theirs and the entropy adds.
  const RealVector odd = odd_populations(spec.mean_excitation, spec.cutoff);
  const RealVector even = even_populations(spec.mean_excitation, spec.cutoff);
  r.s_tqp_spectral = entropy_bits(odd / odd.sum()) + entropy_bits(even / even.sum());
  if (std::abs(r.s_tqp_spectral - r.s_tqp) > 1e-6) {
    throw ThermalError("entropy_report: spectral and closed-form S(rho0) differ by " +
                       std::to_string(std::abs(r.s_tqp_spectral - r.s_tqp)) + "; raise the cutoff");
  }

  r.crossover = r.s_tqp > r.s_thermal;
  r.landauer_pure = r.s_thermal;
  r.landauer_tqp = 2.0 * r.s_thermal - r.s_tqp;
  return r;
}

double entropy_crossover(double lo, double hi, double tol) {
  auto f = [](double n) { return tqp_entropy(n) - thermal_entropy(n); };
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::invalid_argument("entropy_crossover: bracket does not straddle a root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace tqp

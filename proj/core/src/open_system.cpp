#include "tqp/open_system.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>

#include "tqp/parallel.hpp"
#include "tqp/thermal.hpp"

namespace tqp {

void NoiseParams::validate() const {
  for (double v : {nu, eta, n_th, gamma_dc, gamma_dp, delta, omega}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("NoiseParams: rates must be finite and non-negative");
  }
  if (!(q > 0.0)) throw std::invalid_argument("NoiseParams: Q must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("NoiseParams: nu must be positive");
}

namespace {

double decay_rate(const NoiseParams& n) { return n.kappa() * (n.n_th + 1.0); }
double heating_rate(const NoiseParams& n) { return n.kappa() * n.n_th; }

}  // namespace

Matrix lindblad_rhs(const Matrix& rho, const Matrix& h, const Matrix& a, const NoiseParams& noise) {
  Matrix out = -kI * (h * rho - rho * h);
  const double g1 = decay_rate(noise);
  const double g2 = heating_rate(noise);
  if (g1 > 0.0) {
    const Matrix ada = a.adjoint() * a;
    out += g1 * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
  }
  if (g2 > 0.0) {
    const Matrix aad = a * a.adjoint();
    out += g2 * (a.adjoint() * rho * a - 0.5 * (aad * rho + rho * aad));
  }
  return out;
}

Matrix lindblad_superoperator(const Matrix& h, const Matrix& a, const NoiseParams& noise) {
  const Eigen::Index n = h.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix l = -kI * (kron(id, h) - kron(h.transpose(), id));
  auto dissipator = [&](const Matrix& op, double rate) {
    if (rate <= 0.0) return;
    const Matrix odo = op.adjoint() * op;
    l += rate * (kron(op.conjugate(), op) - 0.5 * kron(id, odo) - 0.5 * kron(odo.transpose(), id));
  };
  dissipator(a, decay_rate(noise));
  dissipator(a.adjoint(), heating_rate(noise));
  return l;
}

// ---------------------------------------------------------------- schedule expansion

namespace {

enum class Generator { Free, Bare };

struct TimedOp {
  Generator gen;
  double duration;
};

// A schedule flattened to timed evolutions and instantaneous unitaries.
struct Step {
  bool timed = false;
  TimedOp op{Generator::Free, 0.0};
  Matrix unitary;
};

struct Model {
  std::size_t dim = 0;
  bool hybrid = false;
  std::size_t cutoff = 0;
  Matrix a;
  Matrix h_free;
  Matrix h_bare;

  const Matrix& hamiltonian(Generator g) const { return g == Generator::Free ? h_free : h_bare; }
};

Model build_model(const SpaceLayout& layout, const HybridParams& params) {
  params.validate();
  if (layout.mode_count() != 1 || layout.qubit_count() > 1) {
    throw LayoutError("open_system: expected one mode with at most one ancilla, got " + layout.describe());
  }
  Model m;
  m.cutoff = layout.cutoff(0);
  m.dim = layout.total_dim();
  m.hybrid = layout.qubit_count() == 1;
  if (m.hybrid) {
    m.a = kron(Matrix::Identity(2, 2), annihilation_matrix(m.cutoff));
    m.h_free = hybrid_hamiltonian(params, m.cutoff);
    m.h_bare = bare_hamiltonian(params, m.cutoff);
  } else {
    if (params.eta > 0.0) throw LayoutError("open_system: coupling needs an ancilla qubit");
    m.a = annihilation_matrix(m.cutoff);
    m.h_free = params.nu * number_matrix(m.cutoff);
    m.h_bare = m.h_free;
  }
  return m;
}

Matrix rotation_on(const Model& m, Pauli axis, double angle) {
  if (!m.hybrid) throw LayoutError("open_system: qubit rotation on a layout without ancilla");
  const Matrix r = std::cos(angle) * Matrix::Identity(2, 2) + kI * std::sin(angle) * pauli_matrix(axis);
  return kron(r, Matrix::Identity(static_cast<Eigen::Index>(m.cutoff), static_cast<Eigen::Index>(m.cutoff)));
}

Matrix mode_phase_on(const Model& m, double phi) {
  const auto d = static_cast<Eigen::Index>(m.cutoff);
  Matrix ph = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) ph(k, k) = std::exp(kI * (phi * static_cast<double>(k)));
  return m.hybrid ? kron(Matrix::Identity(2, 2), ph) : ph;
}

std::vector<Step> flatten(const Model& m, const PulseSchedule& schedule) {
  std::vector<Step> out;
  auto timed = [&](Generator g, double t) {
    if (t <= 0.0) return;
    Step s;
    s.timed = true;
    s.op = {g, t};
    out.push_back(std::move(s));
  };
  auto unitary = [&](Matrix u) {
    Step s;
    s.unitary = std::move(u);
    out.push_back(std::move(s));
  };
  for (const auto& seg : schedule.segments()) {
    if (const auto* f = std::get_if<FreeEvolution>(&seg)) {
      timed(Generator::Free, f->duration);
    } else if (const auto* r = std::get_if<QubitRotation>(&seg)) {
      unitary(rotation_on(m, r->axis, r->angle));
    } else if (const auto* w = std::get_if<WaitingPeriod>(&seg)) {
      if (w->flip_interval == 0.0) {
        timed(Generator::Bare, w->duration);
        continue;
      }
      const Matrix on = rotation_on(m, Pauli::X, kPi / 2.0);
      const Matrix off = rotation_on(m, Pauli::X, -kPi / 2.0);
      const double dt = w->flip_interval;
      const auto blocks = static_cast<std::size_t>(std::floor(w->duration / (2.0 * dt) + 1e-12));
      auto block = [&](double h) {
        timed(Generator::Free, h);
        unitary(off);
        timed(Generator::Free, h);
        unitary(on);
      };
      for (std::size_t b = 0; b < blocks; ++b) block(dt);
      const double rest = w->duration - 2.0 * dt * static_cast<double>(blocks);
      if (rest > 1e-14) block(rest / 2.0);
    } else if (const auto* p = std::get_if<ModePhase>(&seg)) {
      unitary(mode_phase_on(m, p->phi));
    }
  }
  return out;
}

// ---------------------------------------------------------------- RK4 master

class MasterIntegrator {
 public:
  MasterIntegrator(const Model& m, const NoiseParams& noise, double dt, std::size_t superop_limit)
      : m_(m), noise_(noise), dt_(dt), use_superop_(m.dim * m.dim <= superop_limit) {}

  Matrix run(Matrix rho, const std::vector<Step>& steps) {
    for (const auto& s : steps) {
      if (!s.timed) {
        rho = s.unitary * rho * s.unitary.adjoint();
        continue;
      }
      const double t = s.op.duration;
      const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(t / dt_ - 1e-9)));
      const double h = t / static_cast<double>(k);
      if (use_superop_) {
        const Matrix& prop = power(s.op.gen, h, k);
        const Eigen::Index n = rho.rows();
        Eigen::Map<const Vector> v(rho.data(), n * n);
        Vector w = prop * v;
        rho = Eigen::Map<Matrix>(w.data(), n, n);
      } else {
        const Matrix& hm = m_.hamiltonian(s.op.gen);
        for (std::size_t i = 0; i < k; ++i) {
          const Matrix k1 = lindblad_rhs(rho, hm, m_.a, noise_);
          const Matrix k2 = lindblad_rhs(rho + 0.5 * h * k1, hm, m_.a, noise_);
          const Matrix k3 = lindblad_rhs(rho + 0.5 * h * k2, hm, m_.a, noise_);
          const Matrix k4 = lindblad_rhs(rho + h * k3, hm, m_.a, noise_);
          rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
      }
    }
    return rho;
  }

 private:
  const Matrix& power(Generator g, double h, std::size_t k) {
    const auto key = std::make_tuple(static_cast<int>(g), h, k);
    auto it = powers_.find(key);
    if (it != powers_.end()) return it->second;
    const Matrix hl = h * superop(g);
    const Eigen::Index n = hl.rows();
    Matrix step = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int j = 1; j <= 4; ++j) {
      term = (term * hl) / static_cast<double>(j);
      step += term;
    }
    return powers_.emplace(key, matrix_power(step, k)).first->second;
  }

  const Matrix& superop(Generator g) {
    auto it = superops_.find(static_cast<int>(g));
    if (it == superops_.end()) {
      it = superops_.emplace(static_cast<int>(g), lindblad_superoperator(m_.hamiltonian(g), m_.a, noise_)).first;
    }
    return it->second;
  }

  const Model& m_;
  NoiseParams noise_;
  double dt_;
  bool use_superop_;
  std::map<int, Matrix> superops_;
  std::map<std::tuple<int, double, std::size_t>, Matrix> powers_;
};

}  // namespace

MasterResult evolve_master(const HybridState& state, const PulseSchedule& schedule, const HybridParams& params,
                           const NoiseParams& noise, const MasterOptions& options) {
  noise.validate();
  if (!(options.dt > 0.0)) throw std::invalid_argument("evolve_master: dt must be positive");
  const Model m = build_model(state.layout(), params);
  const std::vector<Step> steps = flatten(m, schedule);
  const Matrix rho0 = state.to_density();

  double dt = options.dt;
  Matrix current = MasterIntegrator(m, noise, dt, options.superoperator_limit).run(rho0, steps);
  MasterResult result{HybridState::mixed(state.layout(), current, state.discarded_weight())};
  result.dt = dt;
  if (options.certify) {
    bool ok = false;
    for (int i = 1; i <= options.max_halvings; ++i) {
      dt *= 0.5;
      Matrix finer = MasterIntegrator(m, noise, dt, options.superoperator_limit).run(rho0, steps);
      result.certification_distance = trace_distance(finer, current);
      result.halvings = i;
      result.dt = dt;
      current = std::move(finer);
      if (result.certification_distance < options.certify_tolerance) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConvergenceError("evolve_master: no convergence after " + std::to_string(options.max_halvings) +
                             " halvings (last trace distance " + std::to_string(result.certification_distance) + ")");
    }
  }
  result.state = HybridState::mixed(state.layout(), current, state.discarded_weight());
  result.trace_error = std::abs(current.trace().real() - state.trace());
  result.hermiticity_defect = hermiticity_defect(current);
  result.min_eigenvalue = hermitian_eigenvalues(current).minCoeff();
  return result;
}

// ---------------------------------------------------------------- trajectories

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

namespace {

Matrix effective_hamiltonian(const Model& m, Generator g, const NoiseParams& noise) {
  const Matrix ada = m.a.adjoint() * m.a;
  const Matrix aad = m.a * m.a.adjoint();
  return m.hamiltonian(g) - 0.5 * kI * (decay_rate(noise) * ada + heating_rate(noise) * aad);
}

struct PropagatorCache {
  std::map<std::pair<int, double>, Matrix> whole;
  std::map<std::pair<int, double>, std::pair<std::size_t, Matrix>> sub;
};

}  // namespace

TrajectoryResult jump_unravelling(const HybridState& state, const PulseSchedule& schedule, const HybridParams& params,
                                  const NoiseParams& noise, const TrajectoryOptions& options) {
  noise.validate();
  if (options.trajectories == 0) throw std::invalid_argument("jump_unravelling: need at least one trajectory");
  if (!(options.substep > 0.0)) throw std::invalid_argument("jump_unravelling: substep must be positive");
  const Model m = build_model(state.layout(), params);
  const std::vector<Step> steps = flatten(m, schedule);

  const Matrix heff[2] = {effective_hamiltonian(m, Generator::Free, noise),
                          effective_hamiltonian(m, Generator::Bare, noise)};
  PropagatorCache cache;
  for (const auto& s : steps) {
    if (!s.timed) continue;
    const auto key = std::make_pair(static_cast<int>(s.op.gen), s.op.duration);
    if (cache.whole.count(key)) continue;
    const Matrix& h = heff[key.first];
    cache.whole.emplace(key, expm(-kI * s.op.duration * h));
    const auto parts = static_cast<std::size_t>(std::max(1.0, std::ceil(s.op.duration / options.substep - 1e-9)));
    cache.sub.emplace(key, std::make_pair(parts, Matrix(expm(-kI * (s.op.duration / static_cast<double>(parts)) * h))));
  }
  const Matrix jumps[2] = {std::sqrt(decay_rate(noise)) * m.a, std::sqrt(heating_rate(noise)) * m.a.adjoint()};

  // Initial ensemble.
  std::vector<Vector> pure_states;
  std::vector<double> cumulative;
  if (state.is_pure()) {
    pure_states.push_back(state.vector().normalized());
    cumulative.push_back(1.0);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (state.density() + state.density().adjoint()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double w = es.eigenvalues()(i);
      if (w <= 1e-14) continue;
      acc += w;
      pure_states.push_back(es.eigenvectors().col(i));
      cumulative.push_back(acc);
    }
    for (double& c : cumulative) c /= acc;
  }

  const std::size_t n = options.trajectories;
  std::vector<Vector> finals(n);
  std::vector<std::size_t> counts(n, 0);
  parallel_for(n, options.threads, [&](std::size_t index) {
    std::mt19937_64 rng(trajectory_seed(options.seed, index));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double pick = uni(rng);
    std::size_t which = 0;
    while (which + 1 < cumulative.size() && pick > cumulative[which]) ++which;
    Vector psi = pure_states[which];
    double r = uni(rng);
    std::size_t count = 0;

    auto jump = [&] {
      const double w0 = (jumps[0] * psi).squaredNorm();
      const double w1 = (jumps[1] * psi).squaredNorm();
      const Vector next = (uni(rng) * (w0 + w1) < w0) ? Vector(jumps[0] * psi) : Vector(jumps[1] * psi);
      psi = next.normalized();
      r = uni(rng);
      ++count;
    };

    for (const auto& s : steps) {
      if (!s.timed) {
        psi = s.unitary * psi;
        continue;
      }
      const auto key = std::make_pair(static_cast<int>(s.op.gen), s.op.duration);
      Vector trial = cache.whole.at(key) * psi;
      if (trial.squaredNorm() > r) {
        psi = std::move(trial);
        continue;
      }
      const auto& [parts, p] = cache.sub.at(key);
      for (std::size_t i = 0; i < parts; ++i) {
        psi = p * psi;
        if (psi.squaredNorm() <= r) jump();
      }
    }
    finals[index] = psi.normalized();
    counts[index] = count;
  });

  TrajectoryResult out;
  out.trajectories = n;
  out.mean_density = Matrix::Zero(static_cast<Eigen::Index>(m.dim), static_cast<Eigen::Index>(m.dim));
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.mean_density += finals[i] * finals[i].adjoint();
    sum += static_cast<double>(counts[i]);
    sum2 += static_cast<double>(counts[i] * counts[i]);
  }
  out.mean_density /= static_cast<double>(n);
  out.mean_jumps = sum / static_cast<double>(n);
  out.jump_stddev = std::sqrt(std::max(0.0, sum2 / static_cast<double>(n) - out.mean_jumps * out.mean_jumps));
  return out;
}

double jump_rate(double mean_excitation, const NoiseParams& noise) {
  return (2.0 * noise.n_th * mean_excitation + noise.n_th + mean_excitation) * noise.kappa();
}

double short_time_jump_probability(const HybridState& state, const HybridParams& params, const NoiseParams& noise,
                                   double dt) {
  noise.validate();
  const Model m = build_model(state.layout(), params);
  const Matrix p = expm(-kI * dt * effective_hamiltonian(m, Generator::Free, noise));
  const Matrix rho = state.to_density();
  return 1.0 - (p * rho * p.adjoint()).trace().real() / rho.trace().real();
}

// ---------------------------------------------------------------- parity-measurement fidelity

std::vector<FidelityConfig> figure3_configs() {
  std::vector<FidelityConfig> out;
  for (std::size_t reps : {50, 100, 200}) out.push_back({reps, eta_for_repetitions(reps)});
  return out;
}

FidelityPoint figure3_fidelity(double mean_excitation, const FidelityConfig& config,
                               const std::optional<NoiseParams>& noise, double tail, std::size_t cutoff_override) {
  FidelityPoint fp;
  fp.mean_excitation = mean_excitation;
  fp.config = config;
  fp.baseline = 1.0 / (mean_excitation + 1.0);
  const std::size_t d =
      cutoff_override > 0 ? cutoff_override : ThermalSpec::with_tail(mean_excitation, tail, 8).cutoff;
  fp.cutoff = d;

  RealVector p = thermal_populations(mean_excitation, d);
  p /= p.sum();
  Matrix rho_mode = Matrix::Zero(p.size(), p.size());
  rho_mode.diagonal() = p.cast<cplx>();
  const Matrix plus = plus_state() * plus_state().adjoint();
  Matrix rho = kron(plus, rho_mode);

  const SpaceLayout layout = hybrid_layout(d);
  if (config.repetitions == 0) {
    const Matrix c = tensor_embed(local::controlled_parity(layout, 0, 0)).matrix();
    rho = c * rho * c.adjoint();
  } else {
    const HybridParams params{noise ? noise->nu : 1.0, config.eta};
    if (!noise || noise->closed()) {
      const Matrix c = engineered_controlled_parity(params, config.repetitions, d);
      rho = c * rho * c.adjoint();
    } else {
      const auto schedule = engineered_controlled_parity_schedule(params, config.repetitions);
      rho = evolve_master(HybridState::mixed(layout, rho), schedule, params, *noise).state.density();
    }
  }

  const auto n = static_cast<Eigen::Index>(d);
  const Matrix s = rho.topLeftCorner(n, n) + rho.bottomRightCorner(n, n);
  const Matrix x = rho.topRightCorner(n, n) + rho.bottomLeftCorner(n, n);
  const Matrix rho_plus = 0.5 * (s + x);
  const Matrix rho_minus = 0.5 * (s - x);
  const double total = rho.trace().real();
  fp.p_plus = rho_plus.trace().real() / total;
  fp.p_minus = rho_minus.trace().real() / total;

  const Matrix par = parity_matrix(d);
  auto factor = [&](const Matrix& branch, double prob, double sign) {
    if (prob < kDegenerateBranch) return 1.0;
    const Matrix proj = Matrix::Identity(n, n) + sign * par;
    return 0.5 * (branch * proj).trace().real() / branch.trace().real();
  };
  fp.fidelity = factor(rho_plus, fp.p_plus, 1.0) * factor(rho_minus, fp.p_minus, -1.0);
  return fp;
}

// ---------------------------------------------------------------- ε_TQP

double tqp_gate_time(double eta, double nu) { return 9.0 * kPi / (64.0 * eta * eta * nu); }

double epsilon_tqp(const NoiseParams& noise, double mean_excitation, double eta) {
  noise.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("epsilon_tqp: eta must be positive");
  return (2.0 * noise.n_th * mean_excitation + noise.n_th + mean_excitation) * 9.0 * kPi / (64.0 * eta * eta * noise.q);
}

EpsilonCheck epsilon_tqp_trajectories(const NoiseParams& noise, double mean_excitation, double eta,
                                      std::size_t cutoff, const TrajectoryOptions& options) {
  EpsilonCheck c;
  c.closed_form = epsilon_tqp(noise, mean_excitation, eta);
  const HybridParams params{noise.nu, eta};
  c.time = tqp_gate_time(eta, noise.nu);
  c.cutoff = cutoff;
  c.trajectories = options.trajectories;
  const auto reps = static_cast<std::size_t>(std::ceil(c.time / sequence_time(params)));
  const PulseSchedule schedule = build_h2_sequence(params, reps).truncated(c.time);

  RealVector p = thermal_populations(mean_excitation, cutoff);
  p /= p.sum();
  Matrix rho_mode = Matrix::Zero(p.size(), p.size());
  rho_mode.diagonal() = p.cast<cplx>();
  const Matrix rho = kron(plus_state() * plus_state().adjoint(), rho_mode);
  const TrajectoryResult t =
      jump_unravelling(HybridState::mixed(hybrid_layout(cutoff), rho), schedule, params, noise, options);
  c.trajectory_mean_jumps = t.mean_jumps;
  c.relative_difference = std::abs(t.mean_jumps - c.closed_form) / c.closed_form;
  return c;
}

}  // namespace tqp

#include "tqp/pulse.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace tqp {

void HybridParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("HybridParams: nu must be positive");
  if (!(eta >= 0.0) || eta > 0.2) throw std::invalid_argument("HybridParams: eta must lie in [0, 0.2]");
}

SpaceLayout hybrid_layout(std::size_t cutoff) { return SpaceLayout(1, {cutoff}); }

namespace {

Matrix identity2() { return Matrix::Identity(2, 2); }

Matrix mode_identity(std::size_t d) {
  return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

// Orthonormal eigenvectors of σ for eigenvalues +1 and −1.
std::pair<Vector, Vector> pauli_eigenvectors(Pauli p) {
  Vector plus(2), minus(2);
  const double r = 1.0 / std::sqrt(2.0);
  switch (p) {
    case Pauli::Z:
      plus << 1.0, 0.0;
      minus << 0.0, 1.0;
      break;
    case Pauli::X:
      plus << r, r;
      minus << r, -r;
      break;
    case Pauli::Y:
      plus << r, cplx(0.0, r);
      minus << r, cplx(0.0, -r);
      break;
  }
  return {plus, minus};
}

Matrix bare_mode_propagator(double nu, double t, std::size_t d) {
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t n = 0; n < d; ++n) {
    u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = std::exp(-kI * (nu * t * static_cast<double>(n)));
  }
  return u;
}

Matrix mode_phase_matrix(double phi, std::size_t d) { return bare_mode_propagator(1.0, -phi, d); }

Matrix rotation_matrix(Pauli axis, double angle) {
  return std::cos(angle) * identity2() + kI * std::sin(angle) * pauli_matrix(axis);
}

}  // namespace

Matrix hybrid_hamiltonian(const HybridParams& params, std::size_t cutoff) {
  params.validate();
  const Matrix a = annihilation_matrix(cutoff);
  return params.nu * kron(identity2(), number_matrix(cutoff)) +
         params.nu * params.eta * kron(pauli_matrix(params.coupling_axis), a + a.adjoint());
}

Matrix bare_hamiltonian(const HybridParams& params, std::size_t cutoff) {
  params.validate();
  return params.nu * kron(identity2(), number_matrix(cutoff));
}

TruncatedOperator exact_free_propagator(const HybridParams& params, double t, std::size_t cutoff) {
  params.validate();
  const double nut = params.nu * t;
  const double eta = params.eta;
  const Matrix rotation = bare_mode_propagator(params.nu, t, cutoff);
  const cplx phase = std::exp(kI * (eta * eta * (nut - std::sin(nut))));
  const Matrix a = annihilation_matrix(cutoff);
  const cplx shift = eta * (std::exp(kI * nut) - 1.0);

  const auto [plus, minus] = pauli_eigenvectors(params.coupling_axis);
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(2 * cutoff), static_cast<Eigen::Index>(2 * cutoff));
  for (int s : {1, -1}) {
    const cplx alpha = -static_cast<double>(s) * shift;
    const Matrix disp = expm(alpha * a.adjoint() - std::conj(alpha) * a);
    const Vector& v = s == 1 ? plus : minus;
    u += kron(v * v.adjoint(), phase * rotation * disp);
  }
  return {hybrid_layout(cutoff), std::move(u)};
}

// ---------------------------------------------------------------- schedules

namespace {

double segment_duration(const Segment& s) {
  if (const auto* f = std::get_if<FreeEvolution>(&s)) return f->duration;
  if (const auto* w = std::get_if<WaitingPeriod>(&s)) return w->duration;
  return 0.0;
}

const char* axis_name(Pauli p) {
  switch (p) {
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    case Pauli::Z: return "Z";
  }
  return "?";
}

Pauli parse_axis(const std::string& s) {
  if (s == "X") return Pauli::X;
  if (s == "Y") return Pauli::Y;
  if (s == "Z") return Pauli::Z;
  throw std::invalid_argument("schedule: unknown axis '" + s + "'");
}

}  // namespace

void PulseSchedule::append(Segment s) {
  const double d = segment_duration(s);
  if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("PulseSchedule: durations must be non-negative");
  if (const auto* w = std::get_if<WaitingPeriod>(&s); w && w->flip_interval < 0.0) {
    throw std::invalid_argument("PulseSchedule: flip interval must be non-negative");
  }
  segments_.push_back(s);
}

void PulseSchedule::append(const PulseSchedule& other, std::size_t times) {
  for (std::size_t i = 0; i < times; ++i) {
    segments_.insert(segments_.end(), other.segments_.begin(), other.segments_.end());
  }
}

double PulseSchedule::total_time() const {
  double t = 0.0;
  for (const auto& s : segments_) t += segment_duration(s);
  return t;
}

PulseSchedule PulseSchedule::truncated(double t) const {
  PulseSchedule out;
  double elapsed = 0.0;
  for (const auto& s : segments_) {
    if (elapsed >= t) break;
    const double d = segment_duration(s);
    if (elapsed + d <= t) {
      out.segments_.push_back(s);
    } else {
      Segment cut = s;
      if (auto* f = std::get_if<FreeEvolution>(&cut)) f->duration = t - elapsed;
      if (auto* w = std::get_if<WaitingPeriod>(&cut)) w->duration = t - elapsed;
      out.segments_.push_back(cut);
    }
    elapsed += d;
  }
  return out;
}

std::string PulseSchedule::to_json() const {
  using nlohmann::json;
  json segs = json::array();
  for (const auto& s : segments_) {
    if (const auto* f = std::get_if<FreeEvolution>(&s)) {
      segs.push_back({{"type", "free"}, {"duration", f->duration}});
    } else if (const auto* r = std::get_if<QubitRotation>(&s)) {
      segs.push_back({{"type", "rotation"}, {"axis", axis_name(r->axis)}, {"angle", r->angle}});
    } else if (const auto* w = std::get_if<WaitingPeriod>(&s)) {
      segs.push_back({{"type", "wait"}, {"duration", w->duration}, {"flip_interval", w->flip_interval}});
    } else if (const auto* m = std::get_if<ModePhase>(&s)) {
      segs.push_back({{"type", "mode_phase"}, {"phi", m->phi}});
    }
  }
  json doc{{"version", 1}, {"total_time", total_time()}, {"segments", segs}};
  return doc.dump(2);
}

PulseSchedule PulseSchedule::from_json(const std::string& text) {
  using nlohmann::json;
  const json doc = json::parse(text);
  if (doc.value("version", 1) != 1) throw std::invalid_argument("schedule: unsupported version");
  PulseSchedule out;
  for (const auto& s : doc.at("segments")) {
    const std::string type = s.at("type").get<std::string>();
    if (type == "free") {
      out.append(FreeEvolution{s.at("duration").get<double>()});
    } else if (type == "rotation") {
      out.append(QubitRotation{parse_axis(s.at("axis").get<std::string>()), s.at("angle").get<double>()});
    } else if (type == "wait") {
      out.append(WaitingPeriod{s.at("duration").get<double>(), s.value("flip_interval", 0.0)});
    } else if (type == "mode_phase") {
      out.append(ModePhase{s.at("phi").get<double>()});
    } else {
      throw std::invalid_argument("schedule: unknown segment type '" + type + "'");
    }
  }
  return out;
}

double sequence_time(const HybridParams& params) { return 18.0 * kPi / params.nu; }

PulseSchedule build_h2_sequence(const HybridParams& params, std::size_t repetitions, double flip_interval) {
  params.validate();
  if (repetitions == 0) throw std::invalid_argument("build_h2_sequence: repetitions must be at least 1");
  const double q = kPi / 4.0;
  const FreeEvolution f{kPi / params.nu};
  PulseSchedule block;
  block.append(QubitRotation{Pauli::X, -q});
  block.append(f);
  block.append(QubitRotation{Pauli::X, q});
  block.append(QubitRotation{Pauli::Y, -q});
  block.append(f);
  block.append(QubitRotation{Pauli::Y, q});
  block.append(QubitRotation{Pauli::X, q});
  block.append(f);
  block.append(QubitRotation{Pauli::X, -q});
  block.append(QubitRotation{Pauli::Y, q});
  block.append(f);
  block.append(QubitRotation{Pauli::Y, -q});
  block.append(WaitingPeriod{kPi / (2.0 * params.nu), flip_interval});

  PulseSchedule sequence;
  sequence.append(block, 4);
  PulseSchedule out;
  out.append(sequence, repetitions);
  return out;
}

Matrix schedule_unitary(const HybridParams& params, const PulseSchedule& schedule, std::size_t cutoff) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(2 * cutoff);
  Matrix u = Matrix::Identity(n, n);
  std::map<double, Matrix> free_cache;
  std::map<std::pair<double, double>, Matrix> wait_cache;
  for (const auto& s : schedule.segments()) {
    if (const auto* f = std::get_if<FreeEvolution>(&s)) {
      auto it = free_cache.find(f->duration);
      if (it == free_cache.end()) {
        it = free_cache.emplace(f->duration, exact_free_propagator(params, f->duration, cutoff).matrix()).first;
      }
      u = it->second * u;
    } else if (const auto* r = std::get_if<QubitRotation>(&s)) {
      const Matrix rot = rotation_matrix(r->axis, r->angle);
      const Eigen::Index d = static_cast<Eigen::Index>(cutoff);
      Matrix top = u.topRows(d);
      Matrix bottom = u.bottomRows(d);
      u.topRows(d) = rot(0, 0) * top + rot(0, 1) * bottom;
      u.bottomRows(d) = rot(1, 0) * top + rot(1, 1) * bottom;
    } else if (const auto* w = std::get_if<WaitingPeriod>(&s)) {
      if (w->flip_interval == 0.0) {
        const Matrix bare = kron(identity2(), bare_mode_propagator(params.nu, w->duration, cutoff));
        u = bare.diagonal().asDiagonal() * u;
      } else {
        const auto key = std::make_pair(w->duration, w->flip_interval);
        auto it = wait_cache.find(key);
        if (it == wait_cache.end()) {
          it = wait_cache
                   .emplace(key, waiting_period_flip_cancellation(params, w->duration, w->flip_interval, cutoff))
                   .first;
        }
        u = it->second * u;
      }
    } else if (const auto* m = std::get_if<ModePhase>(&s)) {
      const Matrix ph = kron(identity2(), mode_phase_matrix(m->phi, cutoff));
      u = ph.diagonal().asDiagonal() * u;
    }
  }
  return u;
}

Matrix h2_target(const HybridParams& params, std::size_t cutoff, std::size_t repetitions) {
  const double g = 64.0 * params.eta * params.eta * static_cast<double>(repetitions);
  const auto n = static_cast<Eigen::Index>(2 * cutoff);
  Matrix t = Matrix::Zero(n, n);
  for (std::size_t q = 0; q < 2; ++q) {
    const double z = q == 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < cutoff; ++k) {
      const auto i = static_cast<Eigen::Index>(q * cutoff + k);
      t(i, i) = std::exp(-kI * (g * z * (static_cast<double>(k) + 0.5)));
    }
  }
  return t;
}

double exact_repetitions(double eta) { return kPi / (128.0 * eta * eta); }

double eta_for_repetitions(std::size_t repetitions) {
  if (repetitions == 0) throw std::invalid_argument("eta_for_repetitions: repetitions must be positive");
  return std::sqrt(kPi / (128.0 * static_cast<double>(repetitions)));
}

CouplingInfo effective_coupling(const HybridParams& params, std::size_t repetitions) {
  params.validate();
  CouplingInfo c;
  const double e2 = params.eta * params.eta;
  c.lambda_nominal = 32.0 / 9.0 * e2 * params.nu;
  c.sequence_time = sequence_time(params);
  c.lambda_schedule = 64.0 * e2 / c.sequence_time;
  c.total_time = static_cast<double>(repetitions) * c.sequence_time;
  c.nominal_gate_time = 9.0 * kPi / (64.0 * e2 * params.nu);
  if (params.eta > 0.0) {
    c.exact_repetitions = exact_repetitions(params.eta);
    c.repetitions_for_eta = static_cast<std::size_t>(std::llround(c.exact_repetitions));
  }
  return c;
}

Matrix waiting_period_flip_cancellation(const HybridParams& params, double duration, double flip_interval,
                                        std::size_t cutoff) {
  params.validate();
  if (!(flip_interval > 0.0) || flip_interval > duration) {
    throw std::invalid_argument("waiting_period_flip_cancellation: need 0 < flip interval <= duration");
  }
  const Matrix h = hybrid_hamiltonian(params, cutoff);
  const Matrix flip_on = kron(rotation_matrix(Pauli::X, kPi / 2.0), mode_identity(cutoff));
  const Matrix flip_off = kron(rotation_matrix(Pauli::X, -kPi / 2.0), mode_identity(cutoff));
  auto block = [&](double dt) {
    const Matrix p = expm(-kI * dt * h);
    return Matrix(flip_on * p * flip_off * p);
  };
  const auto blocks = static_cast<std::size_t>(std::floor(duration / (2.0 * flip_interval) + 1e-12));
  Matrix u = matrix_power(block(flip_interval), blocks);
  const double rest = duration - 2.0 * flip_interval * static_cast<double>(blocks);
  if (rest > 1e-14) u = block(rest / 2.0) * u;
  return u;
}

std::vector<std::size_t> low_number_columns(std::size_t cutoff, std::size_t n_max) {
  std::vector<std::size_t> cols;
  for (std::size_t q = 0; q < 2; ++q) {
    for (std::size_t n = 0; n <= n_max && n < cutoff; ++n) cols.push_back(q * cutoff + n);
  }
  return cols;
}

double subspace_residual(const Matrix& u, const Matrix& v, std::size_t cutoff, std::size_t n_max) {
  const auto cols = low_number_columns(cutoff, n_max);
  return gauged_distance(u, v, cols);
}

FlipReport flip_cancellation_residual(const HybridParams& params, double duration, double flip_interval,
                                      std::size_t cutoff, std::size_t n_max) {
  FlipReport r;
  const Matrix u = waiting_period_flip_cancellation(params, duration, flip_interval, cutoff);
  const Matrix bare = kron(identity2(), bare_mode_propagator(params.nu, duration, cutoff));
  r.residual = subspace_residual(u, bare, cutoff, n_max);
  r.blocks = static_cast<std::size_t>(std::floor(duration / (2.0 * flip_interval) + 1e-12));
  return r;
}

H2Report h2_residual(const HybridParams& params, std::size_t cutoff, std::size_t n_max) {
  params.validate();
  if (cutoff < 8) throw std::invalid_argument("h2_residual: cutoff must be at least 8");
  H2Report r;
  r.eta = params.eta;
  r.cutoff = cutoff;
  r.n_max = n_max == 0 ? cutoff - 6 : n_max;
  const Matrix u = schedule_unitary(params, build_h2_sequence(params, 1), cutoff);
  const Matrix t = h2_target(params, cutoff);
  r.unitarity_defect = unitarity_defect(u);

  const auto cols = low_number_columns(cutoff, r.n_max);
  r.residual = gauged_distance(u, t, cols);

  const Matrix us = select_columns(u, cols);
  const Matrix ts = select_columns(t, cols);
  const cplx overlap = (us.adjoint() * ts).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
  auto column_error = [&](std::size_t n) {
    double e = 0.0;
    for (std::size_t q = 0; q < 2; ++q) {
      const auto c = static_cast<Eigen::Index>(q * cutoff + n);
      e = std::max(e, (u.col(c) * phase - t.col(c)).norm());
    }
    return e;
  };
  r.residual_n0 = column_error(0);
  r.residual_nmax = column_error(r.n_max);

  const auto d = static_cast<Eigen::Index>(cutoff);
  const auto k = static_cast<Eigen::Index>(r.n_max + 1);
  r.offdiag_block = operator_norm(u.block(0, d, d, k)) + operator_norm(u.block(d, 0, d, k));
  return r;
}

double residual_exponent(double eta_a, double residual_a, double eta_b, double residual_b) {
  return std::log(residual_a / residual_b) / std::log(eta_a / eta_b);
}

PulseSchedule engineered_controlled_parity_schedule(const HybridParams& params, std::size_t repetitions) {
  PulseSchedule s = build_h2_sequence(params, repetitions);
  s.append(QubitRotation{Pauli::Z, kPi / 4.0});
  s.append(ModePhase{kPi / 2.0});
  return s;
}

Matrix engineered_controlled_parity(const HybridParams& params, std::size_t repetitions, std::size_t cutoff) {
  const Matrix seq = schedule_unitary(params, build_h2_sequence(params, 1), cutoff);
  PulseSchedule tail;
  tail.append(QubitRotation{Pauli::Z, kPi / 4.0});
  tail.append(ModePhase{kPi / 2.0});
  return schedule_unitary(params, tail, cutoff) * matrix_power(seq, repetitions);
}

}  // namespace tqp

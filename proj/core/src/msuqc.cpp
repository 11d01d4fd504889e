#include "tqp/msuqc.hpp"

#include <cmath>
#include <string>

#include "tqp/encoding.hpp"

namespace tqp {

void LogicalCircuit::validate() const {
  if (qubits == 0) throw CircuitError("circuit: qubit count must be positive");
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const auto& st = steps[s];
    if (st.phi.size() != qubits || st.theta.size() != qubits || st.gamma.size() != qubits - 1) {
      throw CircuitError("circuit step " + std::to_string(s) + ": angle lists must have lengths K, K, K-1");
    }
    for (const auto* list : {&st.phi, &st.theta, &st.gamma}) {
      for (double a : *list) {
        if (!std::isfinite(a)) throw CircuitError("circuit step " + std::to_string(s) + ": non-finite angle");
      }
    }
  }
}

LogicalCircuit random_circuit(std::size_t qubits, std::size_t steps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  LogicalCircuit c;
  c.qubits = qubits;
  for (std::size_t s = 0; s < steps; ++s) {
    CircuitStep st;
    for (std::size_t k = 0; k < qubits; ++k) st.phi.push_back(angle(rng));
    for (std::size_t k = 0; k < qubits; ++k) st.theta.push_back(angle(rng));
    for (std::size_t k = 0; k + 1 < qubits; ++k) st.gamma.push_back(angle(rng));
    c.steps.push_back(std::move(st));
  }
  return c;
}

std::size_t default_pure_cutoff(std::size_t qubits) { return qubits <= 1 ? 8 : 10; }

namespace {

std::vector<GateCircuit> physical_gates(const LogicalCircuit& circuit, const SpaceLayout& layout) {
  std::vector<GateCircuit> gates;
  const std::size_t k_count = circuit.qubits;
  for (const auto& st : circuit.steps) {
    for (std::size_t j = 0; j + 1 < k_count; ++j) {
      gates.push_back(gate_uzz(layout, LogicalQubitRef{j, 0}, LogicalQubitRef{j + 1, 0}, st.gamma[j]));
    }
    for (std::size_t k = 0; k < k_count; ++k) gates.push_back(gate_ux(layout, LogicalQubitRef{k, 0}, st.theta[k]));
    for (std::size_t k = 0; k < k_count; ++k) gates.push_back(gate_uz(layout, LogicalQubitRef{k, 0}, st.phi[k]));
  }
  return gates;
}

bool even_on_readout_modes(const SpaceLayout& layout, std::size_t index, std::size_t qubits) {
  for (std::size_t k = 0; k < qubits; ++k) {
    const std::size_t s = layout.mode_subsystem(2 * k + 1);
    if (((index / layout.stride(s)) % layout.subsystem_dim(s)) % 2 != 0) return false;
  }
  return true;
}

double vector_plus_fidelity(const Vector& psi) {
  const Eigen::Index half = psi.size() / 2;
  return 0.5 * (psi.head(half) + psi.tail(half)).squaredNorm() / psi.squaredNorm();
}

}  // namespace

ComputationResult run_pure(const LogicalCircuit& circuit,
                           const std::vector<std::pair<std::size_t, std::size_t>>& basis, std::size_t cutoff) {
  circuit.validate();
  const std::size_t k_count = circuit.qubits;
  if (basis.size() != k_count) throw CircuitError("run_pure: need one basis pair per logical qubit");
  const std::size_t d = cutoff == 0 ? default_pure_cutoff(k_count) : cutoff;
  for (const auto& [m, n] : basis) {
    if (2 * m + 1 + 2 * n > d - 1) {
      throw CircuitError("run_pure: basis pair (" + std::to_string(m) + "," + std::to_string(n) +
                         ") does not fit a complete number block at cutoff " + std::to_string(d));
    }
  }
  const SpaceLayout layout = SpaceLayout::uniform(1, 2 * k_count, d);
  if (layout.total_dim() > kPureDimensionBudget) {
    throw CircuitError("run_pure: dimension " + std::to_string(layout.total_dim()) + " exceeds budget");
  }

  std::vector<std::size_t> digits(layout.subsystem_count(), 0);
  for (std::size_t k = 0; k < k_count; ++k) {
    digits[layout.mode_subsystem(2 * k)] = 2 * basis[k].first + 1;
    digits[layout.mode_subsystem(2 * k + 1)] = 2 * basis[k].second;
  }
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t j = 0; j < 2; ++j) {
    digits[0] = j;
    psi(static_cast<Eigen::Index>(layout.index(digits))) = 1.0 / std::sqrt(2.0);
  }

  ComputationResult r;
  r.mode = RunMode::Pure;
  r.basis = basis;
  r.cutoff = d;
  for (const auto& gate : physical_gates(circuit, layout)) {
    gate.apply(psi);
    r.min_ancilla_fidelity = std::min(r.min_ancilla_fidelity, vector_plus_fidelity(psi));
  }

  double a = 0.0;
  double inside = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi(i));
    if (p == 0.0) continue;
    const auto idx = static_cast<std::size_t>(i);
    if (even_on_readout_modes(layout, idx, k_count)) a += p;
    bool in_pair = true;
    for (std::size_t k = 0; k < k_count && in_pair; ++k) {
      const std::size_t na = (idx / layout.stride(layout.mode_subsystem(2 * k))) % d;
      const std::size_t nb = (idx / layout.stride(layout.mode_subsystem(2 * k + 1))) % d;
      const std::size_t odd = 2 * basis[k].first + 1;
      const std::size_t even = 2 * basis[k].second;
      in_pair = (na == odd && nb == even) || (na == even && nb == odd);
    }
    if (in_pair) inside += p;
  }
  r.a = a;
  r.leakage = std::max(0.0, 1.0 - inside);
  r.truncation_tail = HybridState::pure(layout, std::move(psi)).truncation_tail();
  return r;
}

// ---------------------------------------------------------------- mixed runs

namespace {

// One block of fixed per-qubit excitation numbers N_k. Basis: ancilla bit
// (most significant) times n_{2k} ∈ [0, N_k] per qubit, with n_{2k+1} = N_k − n_{2k}.
struct Sector {
  std::vector<std::size_t> totals;
  std::vector<std::size_t> full_index;
  Matrix rho;
};

struct RestrictedOp {
  bool diagonal = false;
  Vector diag;
  Matrix m;
};

RestrictedOp restrict_to(const LocalOperator& op, const std::vector<std::size_t>& full_index) {
  const SpaceLayout& layout = op.layout();
  const auto& targets = op.targets();
  const auto n = static_cast<Eigen::Index>(full_index.size());
  std::vector<std::size_t> loc(full_index.size());
  std::vector<std::size_t> rest(full_index.size());
  for (std::size_t i = 0; i < full_index.size(); ++i) {
    std::size_t l = 0;
    std::size_t r = full_index[i];
    for (std::size_t t : targets) {
      const std::size_t dgt = (full_index[i] / layout.stride(t)) % layout.subsystem_dim(t);
      l = l * layout.subsystem_dim(t) + dgt;
      r -= dgt * layout.stride(t);
    }
    loc[i] = l;
    rest[i] = r;
  }
  const Matrix& m = op.matrix();
  RestrictedOp out;
  out.diagonal = op.is_diagonal();
  if (out.diagonal) {
    out.diag.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.diag(i) = m(static_cast<Eigen::Index>(loc[i]), static_cast<Eigen::Index>(loc[i]));
    }
    return out;
  }
  out.m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rest[i] == rest[j]) {
        out.m(i, j) = m(static_cast<Eigen::Index>(loc[i]), static_cast<Eigen::Index>(loc[j]));
      }
    }
  }
  return out;
}

void conjugate_block(const RestrictedOp& op, Matrix& rho) {
  if (op.diagonal) {
    rho = op.diag.asDiagonal() * rho * op.diag.conjugate().asDiagonal();
  } else {
    rho = op.m * rho * op.m.adjoint();
  }
}

std::vector<Sector> build_sectors(const SpaceLayout& layout, std::size_t k_count, double mean_excitation,
                                  double& kept) {
  const std::size_t d = layout.cutoff(0);
  const RealVector odd = odd_populations(mean_excitation, d);
  const RealVector even = even_populations(mean_excitation, d);
  std::vector<std::size_t> odd_totals;
  for (std::size_t n = 1; n <= d - 1; n += 2) odd_totals.push_back(n);

  std::vector<Sector> sectors;
  kept = 0.0;
  std::vector<std::size_t> choice(k_count, 0);
  while (true) {
    Sector s;
    for (std::size_t k = 0; k < k_count; ++k) s.totals.push_back(odd_totals[choice[k]]);

    std::size_t local = 1;
    for (std::size_t t : s.totals) local *= t + 1;
    std::vector<double> weights(local, 0.0);
    std::vector<std::size_t> digits(layout.subsystem_count(), 0);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t c = 0; c < local; ++c) {
        std::size_t rem = c;
        double w = 1.0;
        for (std::size_t k = k_count; k-- > 0;) {
          const std::size_t na = rem % (s.totals[k] + 1);
          rem /= s.totals[k] + 1;
          const std::size_t nb = s.totals[k] - na;
          digits[layout.mode_subsystem(2 * k)] = na;
          digits[layout.mode_subsystem(2 * k + 1)] = nb;
          w *= odd(static_cast<Eigen::Index>(na)) * even(static_cast<Eigen::Index>(nb));
        }
        digits[0] = j;
        s.full_index.push_back(layout.index(digits));
        weights[c] = w;
      }
    }
    const auto half = static_cast<Eigen::Index>(local);
    s.rho = Matrix::Zero(2 * half, 2 * half);
    for (Eigen::Index c = 0; c < half; ++c) {
      const double w = 0.5 * weights[static_cast<std::size_t>(c)];
      s.rho(c, c) = w;
      s.rho(c, c + half) = w;
      s.rho(c + half, c) = w;
      s.rho(c + half, c + half) = w;
      kept += weights[static_cast<std::size_t>(c)];
    }
    if (s.rho.trace().real() > 0.0) sectors.push_back(std::move(s));

    std::size_t k = 0;
    while (k < k_count && ++choice[k] == odd_totals.size()) choice[k++] = 0;
    if (k == k_count) break;
  }
  return sectors;
}

double top_level_weight(const SpaceLayout& layout, const std::vector<std::size_t>& index,
                        const RealVector& populations) {
  double tail = 0.0;
  for (std::size_t m = 0; m < layout.mode_count(); ++m) {
    const std::size_t s = layout.mode_subsystem(m);
    double w = 0.0;
    for (std::size_t i = 0; i < index.size(); ++i) {
      if ((index[i] / layout.stride(s)) % layout.subsystem_dim(s) == layout.subsystem_dim(s) - 1) {
        w += populations(static_cast<Eigen::Index>(i));
      }
    }
    tail = std::max(tail, w);
  }
  return tail;
}

ComputationResult run_mixed_sectors(const LogicalCircuit& circuit, double mean_excitation, std::size_t d) {
  const std::size_t k_count = circuit.qubits;
  const SpaceLayout layout = SpaceLayout::uniform(1, 2 * k_count, d);
  double kept = 0.0;
  std::vector<Sector> sectors = build_sectors(layout, k_count, mean_excitation, kept);
  for (auto& s : sectors) s.rho /= kept;

  ComputationResult r;
  r.mode = RunMode::Mixed;
  r.cutoff = d;
  r.discarded_weight = 1.0 - kept;

  for (const auto& gate : physical_gates(circuit, layout)) {
    Matrix q = Matrix::Zero(2, 2);
    for (auto& s : sectors) {
      for (const auto& op : gate.operations()) conjugate_block(restrict_to(op, s.full_index), s.rho);
      const Eigen::Index half = s.rho.rows() / 2;
      q(0, 0) += s.rho.topLeftCorner(half, half).trace();
      q(0, 1) += s.rho.topRightCorner(half, half).trace();
      q(1, 0) += s.rho.bottomLeftCorner(half, half).trace();
      q(1, 1) += s.rho.bottomRightCorner(half, half).trace();
    }
    const double f = 0.5 * (q(0, 0) + q(0, 1) + q(1, 0) + q(1, 1)).real() / q.trace().real();
    r.min_ancilla_fidelity = std::min(r.min_ancilla_fidelity, f);
  }

  double a = 0.0;
  double total = 0.0;
  for (const auto& s : sectors) {
    const RealVector pop = s.rho.diagonal().real();
    for (std::size_t i = 0; i < s.full_index.size(); ++i) {
      const double p = pop(static_cast<Eigen::Index>(i));
      total += p;
      if (even_on_readout_modes(layout, s.full_index[i], k_count)) a += p;
    }
    r.truncation_tail = std::max(r.truncation_tail, top_level_weight(layout, s.full_index, pop));
  }
  r.a = a / total;
  return r;
}

ComputationResult run_mixed_dense(const LogicalCircuit& circuit, double mean_excitation, std::size_t d) {
  const std::size_t k_count = circuit.qubits;
  const SpaceLayout layout = SpaceLayout::uniform(1, 2 * k_count, d);
  if (layout.total_dim() > 2048) {
    throw CircuitError("run_mixed: dense backend limited to dimension 2048, got " +
                       std::to_string(layout.total_dim()));
  }
  double kept = 0.0;
  std::vector<Sector> sectors = build_sectors(layout, k_count, mean_excitation, kept);
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  Matrix rho = Matrix::Zero(n, n);
  for (const auto& s : sectors) {
    for (std::size_t i = 0; i < s.full_index.size(); ++i) {
      for (std::size_t j = 0; j < s.full_index.size(); ++j) {
        rho(static_cast<Eigen::Index>(s.full_index[i]), static_cast<Eigen::Index>(s.full_index[j])) =
            s.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / kept;
      }
    }
  }

  ComputationResult r;
  r.mode = RunMode::Mixed;
  r.cutoff = d;
  r.discarded_weight = 1.0 - kept;
  for (const auto& gate : physical_gates(circuit, layout)) {
    gate.apply(rho);
    const HybridState st = HybridState::mixed(layout, rho);
    r.min_ancilla_fidelity = std::min(r.min_ancilla_fidelity, plus_fidelity(st, 0));
  }
  const HybridState final_state = HybridState::mixed(layout, std::move(rho), 1.0 - kept);
  const RealVector pop = final_state.populations();
  double a = 0.0;
  for (Eigen::Index i = 0; i < pop.size(); ++i) {
    if (even_on_readout_modes(layout, static_cast<std::size_t>(i), k_count)) a += pop(i);
  }
  r.a = a / pop.sum();
  r.truncation_tail = final_state.truncation_tail();
  return r;
}

}  // namespace

ComputationResult run_mixed(const LogicalCircuit& circuit, double mean_excitation, std::size_t cutoff,
                            MixedBackend backend) {
  circuit.validate();
  ThermalSpec{mean_excitation, cutoff}.validate();
  return backend == MixedBackend::Sectors ? run_mixed_sectors(circuit, mean_excitation, cutoff)
                                          : run_mixed_dense(circuit, mean_excitation, cutoff);
}

double qubit_space_oracle(const LogicalCircuit& circuit) {
  circuit.validate();
  const std::size_t k_count = circuit.qubits;
  if (k_count > 10) throw CircuitError("qubit_space_oracle: at most 10 qubits");
  const std::size_t dim = std::size_t{1} << k_count;
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(dim));
  psi(0) = 1.0;
  // Qubit k is bit k of the index; bit value 0 has Z = +1.
  auto z = [](std::size_t i, std::size_t k) { return ((i >> k) & 1U) ? -1.0 : 1.0; };
  for (const auto& st : circuit.steps) {
    for (std::size_t j = 0; j + 1 < k_count; ++j) {
      for (std::size_t i = 0; i < dim; ++i) {
        psi(static_cast<Eigen::Index>(i)) *= std::exp(kI * (st.gamma[j] * z(i, j) * z(i, j + 1)));
      }
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      const double c = std::cos(st.theta[k]);
      const double s = std::sin(st.theta[k]);
      Vector next = psi;
      for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t flipped = i ^ (std::size_t{1} << k);
        next(static_cast<Eigen::Index>(i)) =
            c * psi(static_cast<Eigen::Index>(i)) + kI * s * psi(static_cast<Eigen::Index>(flipped));
      }
      psi = next;
    }
    for (std::size_t k = 0; k < k_count; ++k) {
      for (std::size_t i = 0; i < dim; ++i) psi(static_cast<Eigen::Index>(i)) *= std::exp(kI * (st.phi[k] * z(i, k)));
    }
  }
  return std::norm(psi(0));
}

}  // namespace tqp

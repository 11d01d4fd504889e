#include "tqp/encoding.hpp"

#include <cmath>
#include <string>

namespace tqp {

void LogicalQubitRef::validate(const SpaceLayout& layout) const {
  if (ancilla >= layout.qubit_count()) throw LayoutError("logical qubit: ancilla index out of range");
  if (mode_b() >= layout.mode_count()) {
    throw LayoutError("logical qubit " + std::to_string(index) + " needs modes " + std::to_string(mode_a()) +
                      "," + std::to_string(mode_b()) + " but layout has " + std::to_string(layout.mode_count()));
  }
  if (layout.cutoff(mode_a()) != layout.cutoff(mode_b())) {
    throw LayoutError("logical qubit " + std::to_string(index) + ": modes have different cutoffs");
  }
}

TruncatedOperator logical_z(const SpaceLayout& layout, const LogicalQubitRef& ref) {
  ref.validate(layout);
  return parity(layout, ref.mode_b());
}

TruncatedOperator logical_x(const SpaceLayout& layout, const LogicalQubitRef& ref) {
  ref.validate(layout);
  return two_mode_swap(layout, ref.mode_a(), ref.mode_b());
}

// ---------------------------------------------------------------- circuits

void GateCircuit::append(LocalOperator op) {
  if (!(op.layout() == layout_)) throw LayoutError("GateCircuit::append: layout mismatch");
  ops_.push_back(std::move(op));
}

void GateCircuit::append(const GateCircuit& other) {
  for (const auto& op : other.ops_) append(op);
}

void GateCircuit::apply(Vector& psi) const {
  for (const auto& op : ops_) op.apply(psi);
}

void GateCircuit::apply(Matrix& rho) const {
  for (const auto& op : ops_) op.conjugate(rho);
}

HybridState GateCircuit::apply(const HybridState& state) const {
  if (!(state.layout() == layout_)) throw LayoutError("GateCircuit::apply: layout mismatch");
  if (state.is_pure()) {
    Vector psi = state.vector();
    apply(psi);
    return HybridState::pure(layout_, std::move(psi), state.discarded_weight());
  }
  Matrix rho = state.density();
  apply(rho);
  return HybridState::mixed(layout_, std::move(rho), state.discarded_weight());
}

GateCircuit GateCircuit::adjoint() const {
  GateCircuit out(layout_);
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) out.append(it->adjoint());
  return out;
}

TruncatedOperator GateCircuit::to_operator() const {
  const auto n = static_cast<Eigen::Index>(layout_.total_dim());
  Matrix u = Matrix::Identity(n, n);
  for (const auto& op : ops_) op.apply_left(u);
  return {layout_, std::move(u)};
}

// ---------------------------------------------------------------- variants

EncodingVariant::EncodingVariant(Matrix two_mode_unitary) : v_(std::move(two_mode_unitary)) {
  if (v_->rows() != v_->cols()) throw std::invalid_argument("EncodingVariant: matrix is not square");
  if (unitarity_defect(*v_) > kUnitaryTolerance) throw std::invalid_argument("EncodingVariant: V is not unitary");
}

const Matrix& EncodingVariant::matrix() const {
  if (!v_) throw std::logic_error("EncodingVariant::matrix: identity variant has no matrix");
  return *v_;
}

LocalOperator EncodingVariant::on(const SpaceLayout& layout, const LogicalQubitRef& ref) const {
  ref.validate(layout);
  const std::size_t d = layout.cutoff(ref.mode_a());
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix m = v_ ? *v_ : Matrix(Matrix::Identity(n, n));
  if (m.rows() != n) throw LayoutError("EncodingVariant: matrix does not match the mode pair dimension");
  return {layout, {layout.mode_subsystem(ref.mode_a()), layout.mode_subsystem(ref.mode_b())}, std::move(m)};
}

TruncatedOperator variant_conjugate(const EncodingVariant& variant, const LogicalQubitRef& ref,
                                    const TruncatedOperator& op) {
  if (variant.is_identity()) return op;
  const TruncatedOperator v = tensor_embed(variant.on(op.layout(), ref));
  return {op.layout(), v.matrix() * op.matrix() * v.matrix().adjoint()};
}

// ---------------------------------------------------------------- gates

namespace {

void check_ancilla(const SpaceLayout& layout, const LogicalQubitRef& ref) { ref.validate(layout); }

GateCircuit wrap_variant(const SpaceLayout& layout, const LogicalQubitRef& ref, const EncodingVariant& variant,
                         const GateCircuit& core) {
  if (variant.is_identity()) return core;
  const LocalOperator v = variant.on(layout, ref);
  GateCircuit out(layout);
  out.append(v.adjoint());
  out.append(core);
  out.append(v);
  return out;
}

}  // namespace

GateCircuit gate_uz(const SpaceLayout& layout, const LogicalQubitRef& ref, double theta,
                    const EncodingVariant& variant) {
  check_ancilla(layout, ref);
  GateCircuit c(layout);
  const LocalOperator cp = local::controlled_parity(layout, ref.ancilla, ref.mode_b());
  c.append(cp);
  c.append(local::qubit_rotation(layout, ref.ancilla, Pauli::X, theta));
  c.append(cp);
  return wrap_variant(layout, ref, variant, c);
}

GateCircuit gate_ux(const SpaceLayout& layout, const LogicalQubitRef& ref, double theta,
                    const EncodingVariant& variant) {
  check_ancilla(layout, ref);
  GateCircuit c(layout);
  const LocalOperator b = local::beam_splitter_5050(layout, ref.mode_a(), ref.mode_b());
  const LocalOperator cp = local::controlled_parity(layout, ref.ancilla, ref.mode_b());
  c.append(b);
  c.append(cp);
  c.append(local::qubit_rotation(layout, ref.ancilla, Pauli::X, theta));
  c.append(cp);
  c.append(b.adjoint());
  return wrap_variant(layout, ref, variant, c);
}

GateCircuit gate_uzz(const SpaceLayout& layout, const LogicalQubitRef& k, const LogicalQubitRef& l, double theta) {
  check_ancilla(layout, k);
  check_ancilla(layout, l);
  if (k.index == l.index) throw LayoutError("gate_uzz: logical qubits must differ");
  if (k.ancilla != l.ancilla) throw LayoutError("gate_uzz: both logical qubits must share the ancilla");
  GateCircuit c(layout);
  const LocalOperator ck = local::controlled_parity(layout, k.ancilla, k.mode_b());
  const LocalOperator cl = local::controlled_parity(layout, l.ancilla, l.mode_b());
  c.append(cl);
  c.append(ck);
  c.append(local::qubit_rotation(layout, k.ancilla, Pauli::X, theta));
  c.append(ck);
  c.append(cl);
  return c;
}

Matrix exponential_hermitian_unitary(const Matrix& o, double theta) {
  const Matrix id = Matrix::Identity(o.rows(), o.cols());
  if (max_abs(o * o - id) > 1e-10) throw std::invalid_argument("exponential_hermitian_unitary: O^2 != I");
  return std::cos(theta) * id + kI * std::sin(theta) * o;
}

TruncatedOperator exponential_hermitian_unitary(const TruncatedOperator& o, double theta) {
  return {o.layout(), exponential_hermitian_unitary(o.matrix(), theta)};
}

// ---------------------------------------------------------------- measurement

double plus_fidelity(const HybridState& state, std::size_t qubit) {
  const Matrix r = state.reduced_qubit(qubit);
  const Vector plus = plus_state();
  return (plus.dot(r * plus)).real() / r.trace().real();
}

HybridState insert_qubit(const HybridState& state, std::size_t position, const Vector& qubit_state) {
  const SpaceLayout& in = state.layout();
  if (position > in.qubit_count()) throw LayoutError("insert_qubit: position out of range");
  SpaceLayout out_layout(in.qubit_count() + 1, in.mode_cutoffs());
  const std::size_t sq = out_layout.stride(position);
  const std::size_t m = in.total_dim();
  auto full = [sq](std::size_t r, std::size_t j) {
    return static_cast<Eigen::Index>((r / sq) * 2 * sq + j * sq + (r % sq));
  };
  const auto n = static_cast<Eigen::Index>(out_layout.total_dim());
  if (state.is_pure()) {
    const Vector& phi = state.vector();
    Vector psi = Vector::Zero(n);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < 2; ++j) {
        psi(full(r, j)) = qubit_state(static_cast<Eigen::Index>(j)) * phi(static_cast<Eigen::Index>(r));
      }
    }
    return HybridState::pure(std::move(out_layout), std::move(psi), state.discarded_weight());
  }
  const Matrix& rho_in = state.density();
  Matrix rho = Matrix::Zero(n, n);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = 0; r < m; ++r) {
      const cplx v = rho_in(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v == cplx{}) continue;
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
          rho(full(r, j), full(c, k)) = qubit_state(static_cast<Eigen::Index>(j)) * v *
                                        std::conj(qubit_state(static_cast<Eigen::Index>(k)));
        }
      }
    }
  }
  return HybridState::mixed(std::move(out_layout), std::move(rho), state.discarded_weight());
}

std::vector<MeasurementBranch> parity_measurement_branches(const HybridState& state, std::size_t ancilla,
                                                           std::size_t mode) {
  const SpaceLayout& layout = state.layout();
  if (1.0 - plus_fidelity(state, ancilla) > 1e-10) {
    throw StateError("parity_measurement: ancilla is not in |+>");
  }
  const double total = state.trace();
  Matrix hadamard(2, 2);
  hadamard << 1.0, 1.0, 1.0, -1.0;
  hadamard /= std::sqrt(2.0);
  const HybridState rotated = state.evolved(local::controlled_parity(layout, ancilla, mode))
                                  .evolved(LocalOperator(layout, {layout.qubit_subsystem(ancilla)}, hadamard));

  std::vector<MeasurementBranch> out;
  for (int j = 0; j < 2; ++j) {
    Vector bra = Vector::Zero(2);
    bra(j) = 1.0;
    const HybridState branch = project_qubit(rotated, ancilla, bra);
    MeasurementBranch b;
    b.outcome = j == 0 ? 1 : -1;
    b.probability = branch.trace() / total;
    if (b.probability >= 1e-12) b.post_state = insert_qubit(branch.normalized(), ancilla, plus_state());
    out.push_back(std::move(b));
  }
  return out;
}

MeasurementBranch parity_measurement(const HybridState& state, std::size_t ancilla, std::size_t mode,
                                     std::mt19937_64& rng) {
  auto branches = parity_measurement_branches(state, ancilla, mode);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < branches[0].probability ? std::move(branches[0]) : std::move(branches[1]);
}

MeasurementBranch parity_measurement_forced(const HybridState& state, std::size_t ancilla, std::size_t mode,
                                            int outcome) {
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("parity_measurement_forced: outcome must be +1 or -1");
  auto branches = parity_measurement_branches(state, ancilla, mode);
  MeasurementBranch& b = branches[outcome == 1 ? 0 : 1];
  if (!b.post_state) throw StateError("parity_measurement_forced: branch probability below 1e-12");
  return std::move(b);
}

}  // namespace tqp

#include <cmath>
#include <random>
#include <utility>

#include <Eigen/SparseCore>

#include "tqp/encoding.hpp"
#include "tqp/linalg.hpp"
#include "tqp_cli/commands.hpp"

namespace tqp::cli {

namespace {

struct Check {
  std::string name;
  std::size_t cutoff;
  double residual;
  double tolerance;
};

Matrix dense(const LocalOperator& op) { return tensor_embed(op).matrix(); }

// α|2m+1, 2n⟩ + β|2n, 2m+1⟩ on two modes, optionally with an ancilla in |+⟩.
Vector code_state(const SpaceLayout& layout, std::size_t m, std::size_t n, cplx alpha, cplx beta) {
  const std::size_t d = layout.cutoff(0);
  const std::size_t copies = layout.qubit_count() == 0 ? 1 : 2;
  const double amp = 1.0 / std::sqrt(static_cast<double>(copies));
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  const std::size_t odd = 2 * m + 1, even = 2 * n;
  for (std::size_t q = 0; q < copies; ++q) {
    psi(static_cast<Eigen::Index>(q * d * d + odd * d + even)) += alpha * amp;
    psi(static_cast<Eigen::Index>(q * d * d + even * d + odd)) += beta * amp;
  }
  return psi;
}

// Operators are checked on the subsystems they act on; embedding with an
// identity leaves every residual below unchanged.
void single_mode_checks(std::size_t d, double tol, std::vector<Check>& out) {
  const SpaceLayout modes(0, {d, d});
  const SpaceLayout hybrid(1, {d});
  const auto dim = static_cast<Eigen::Index>(modes.total_dim());
  const Matrix id = Matrix::Identity(dim, dim);
  const Matrix id_h = Matrix::Identity(2 * static_cast<Eigen::Index>(d), 2 * static_cast<Eigen::Index>(d));
  const Matrix p_a = dense(local::parity(modes, 0));
  const Matrix p_b = dense(local::parity(modes, 1));
  const Matrix n_tot = dense(local::number(modes, 0)) + dense(local::number(modes, 1));
  const Matrix s = dense(local::two_mode_swap(modes, 0, 1));
  const Matrix b = dense(local::beam_splitter_5050(modes, 0, 1));
  const Matrix c = dense(local::controlled_parity(hybrid, 0, 0));
  const Matrix n_h = dense(local::number(hybrid, 0));
  const Matrix rx = dense(local::qubit_rotation(hybrid, 0, Pauli::X, 0.37));
  const Matrix ph = dense(local::phase_shift(hybrid, 0, 0.37));
  const Matrix disp = dense(local::displacement(hybrid, 0, cplx(0.3, -0.2)));

  auto add = [&](const std::string& name, double r) { out.push_back({name, d, r, tol}); };
  add("parity_squared", max_abs(p_b * p_b - id));
  add("swap_squared", max_abs(s * s - id));
  add("controlled_parity_squared", max_abs(c * c - id_h));
  add("unitary_beam_splitter", unitarity_defect(b));
  add("unitary_swap", unitarity_defect(s));
  add("unitary_controlled_parity", unitarity_defect(c));
  add("unitary_parity", unitarity_defect(p_b));
  add("unitary_rotation", unitarity_defect(rx));
  add("unitary_phase_shift", unitarity_defect(ph));
  add("unitary_displacement", unitarity_defect(disp));
  add("number_conserved_beam_splitter", max_abs(commutator(b, n_tot)));
  add("number_conserved_swap", max_abs(commutator(s, n_tot)));
  add("number_conserved_controlled_parity", max_abs(commutator(c, n_h)));
  add("parity_conserved_beam_splitter", max_abs(commutator(b, p_a * p_b)));

  // B† P_b B = S on the complete number blocks n_a + n_b ≤ d − 1.
  std::vector<std::size_t> cols;
  for (std::size_t na = 0; na < d; ++na) {
    for (std::size_t nb = 0; na + nb < d; ++nb) cols.push_back(na * d + nb);
  }
  add("beam_splitter_parity_to_swap", max_abs(select_columns(b.adjoint() * p_b * b - s, cols)));

  // Z_L is diagonal and X_L a permutation, so sparse products suffice.
  const SpaceLayout logical(1, {d, d});
  const LogicalQubitRef ref{0, 0};
  using Sparse = Eigen::SparseMatrix<cplx>;
  const Sparse zl = logical_z(logical, ref).matrix().sparseView();
  const Sparse xl = logical_x(logical, ref).matrix().sparseView();
  const auto ldim = static_cast<Eigen::Index>(logical.total_dim());
  const Matrix lid = Matrix::Identity(ldim, ldim);
  add("logical_z_squared", max_abs(Matrix(zl * zl) - lid));
  add("logical_x_squared", max_abs(Matrix(xl * xl) - lid));
  const Sparse anti_op = xl * zl + zl * xl;
  double anti = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < d; ++m) {
    for (std::size_t n = 0; 2 * n < d; ++n) {
      for (int k = 0; k < 2; ++k) {
        const Vector psi = code_state(logical, m, n, k == 0 ? 1.0 : 0.0, k == 0 ? 0.0 : 1.0);
        anti = std::max(anti, (anti_op * psi).cwiseAbs().maxCoeff());
      }
    }
  }
  add("logical_anticommutator", anti);
}

void pauli_checks(double tol, std::vector<Check>& out) {
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix x = pauli_matrix(Pauli::X);
  const Matrix y = pauli_matrix(Pauli::Y);
  const Matrix z = pauli_matrix(Pauli::Z);
  out.push_back({"pauli_x_squared", 2, max_abs(x * x - id), tol});
  out.push_back({"pauli_y_squared", 2, max_abs(y * y - id), tol});
  out.push_back({"pauli_z_squared", 2, max_abs(z * z - id), tol});
  out.push_back({"pauli_xy", 2, max_abs(x * y - kI * z), tol});
  out.push_back({"pauli_yz", 2, max_abs(y * z - kI * x), tol});
  out.push_back({"pauli_zx", 2, max_abs(z * x - kI * y), tol});
  out.push_back({"pauli_anticommute_xz", 2, max_abs(anticommutator(x, z)), tol});
}

struct GateStats {
  double worst = 0.0;
  double min_fidelity = 1.0;
  std::size_t runs = 0;
};

void gate_checks(std::size_t d, std::size_t angles, std::size_t max_label, std::mt19937_64& rng, GateStats& uz,
                 GateStats& ux) {
  const SpaceLayout lay(1, {d, d});
  const LogicalQubitRef ref{0, 0};
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t m = 0; 2 * m + 1 <= max_label; ++m) {
    for (std::size_t n = 0; 2 * n <= max_label; ++n) {
      if (2 * m + 1 + 2 * n <= d - 1) pairs.emplace_back(m, n);
    }
  }
  if (pairs.empty()) return;
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix zl = logical_z(lay, ref).matrix();
  const Matrix xl = logical_x(lay, ref).matrix();
  // Both are involutions (checked above), so e^{iθO}ψ = cosθ ψ + i sinθ Oψ.
  for (std::size_t i = 0; i < angles; ++i) {
    const double theta = angle(rng);
    const auto [m, n] = pairs[i % pairs.size()];
    cplx alpha(normal(rng), normal(rng)), beta(normal(rng), normal(rng));
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    const Vector psi = code_state(lay, m, n, alpha / norm, beta / norm);
    for (int which = 0; which < 2; ++which) {
      const GateCircuit gate = which == 0 ? gate_uz(lay, ref, theta) : gate_ux(lay, ref, theta);
      const Vector o_psi = (which == 0 ? zl : xl) * psi;
      const Vector expected = std::cos(theta) * psi + kI * std::sin(theta) * o_psi;
      Vector out = psi;
      gate.apply(out);
      GateStats& st = which == 0 ? uz : ux;
      st.worst = std::max(st.worst, (out - expected).cwiseAbs().maxCoeff());
      st.min_fidelity = std::min(st.min_fidelity, plus_fidelity(HybridState::pure(lay, out), 0));
      ++st.runs;
    }
  }
}

void zz_checks(std::size_t angles, std::size_t max_label, std::mt19937_64& rng, GateStats& zz) {
  const std::size_t d = max_label + 1;
  const SpaceLayout lay(1, {d, d, d, d});
  const LogicalQubitRef k{0, 0}, l{1, 0};
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_int_distribution<std::size_t> label(0, max_label / 2);
  const LocalOperator pk = local::parity(lay, 1);
  const LocalOperator pl = local::parity(lay, 3);
  for (std::size_t i = 0; i < angles; ++i) {
    const double theta = angle(rng);
    std::size_t m1 = label(rng), n1 = label(rng), m2 = label(rng), n2 = label(rng);
    m1 = std::min(m1, (max_label - 1) / 2);
    m2 = std::min(m2, (max_label - 1) / 2);
    const bool swap1 = rng() & 1, swap2 = rng() & 1;
    std::vector<std::size_t> digits{0, swap1 ? 2 * n1 : 2 * m1 + 1, swap1 ? 2 * m1 + 1 : 2 * n1,
                                    swap2 ? 2 * n2 : 2 * m2 + 1, swap2 ? 2 * m2 + 1 : 2 * n2};
    Vector psi = HybridState::basis(lay, digits).vector();
    digits[0] = 1;
    psi += HybridState::basis(lay, digits).vector();
    psi /= std::sqrt(2.0);

    Vector out = psi;
    gate_uzz(lay, k, l, theta).apply(out);
    Vector o_psi = psi;
    pk.apply(o_psi);
    pl.apply(o_psi);
    const Vector expected = std::cos(theta) * psi + kI * std::sin(theta) * o_psi;
    zz.worst = std::max(zz.worst, (out - expected).cwiseAbs().maxCoeff());
    zz.min_fidelity = std::min(zz.min_fidelity, plus_fidelity(HybridState::pure(lay, out), 0));
    ++zz.runs;
  }
}

}  // namespace

CommandOutput algebra_check(const json& c) {
  const auto cutoffs = c.at("cutoffs").get<std::vector<std::size_t>>();
  const double tol = c.at("tolerance");
  const double gate_tol = c.at("gate_tolerance");
  const double anc_tol = c.at("ancilla_tolerance");
  const std::size_t angles = c.at("angles");
  const std::size_t max_label = c.at("max_label");
  if (cutoffs.empty()) throw UsageError("cutoffs must be non-empty");
  for (std::size_t d : cutoffs) {
    if (d < 2) throw UsageError("cutoffs must be at least 2");
  }

  std::vector<Check> checks;
  pauli_checks(tol, checks);
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  json gates = json::array();
  bool gates_ok = true;
  for (std::size_t d : cutoffs) {
    single_mode_checks(d, tol, checks);
    GateStats uz, ux;
    gate_checks(d, angles, max_label, rng, uz, ux);
    for (const auto& [name, st] : {std::pair{"U_Z", uz}, std::pair{"U_X", ux}}) {
      gates.push_back({{"gate", name}, {"cutoff", d}, {"runs", st.runs}, {"max_deviation", st.worst},
                       {"min_ancilla_fidelity", st.min_fidelity}});
      gates_ok = gates_ok && st.worst <= gate_tol && st.min_fidelity >= 1.0 - anc_tol;
    }
  }
  GateStats zz;
  zz_checks(angles, max_label, rng, zz);
  gates.push_back({{"gate", "U_ZZ"}, {"cutoff", max_label + 1}, {"runs", zz.runs}, {"max_deviation", zz.worst},
                   {"min_ancilla_fidelity", zz.min_fidelity}});
  gates_ok = gates_ok && zz.worst <= gate_tol && zz.min_fidelity >= 1.0 - anc_tol;

  json list = json::array();
  bool ok = gates_ok;
  for (const auto& ch : checks) {
    const bool pass = ch.residual <= ch.tolerance;
    ok = ok && pass;
    list.push_back({{"name", ch.name}, {"cutoff", ch.cutoff}, {"residual", ch.residual}, {"passed", pass}});
  }

  CommandOutput out;
  out.passed = ok;
  out.document = json{{"tool", "tqp"}, {"version", TQP_VERSION_STRING}, {"command", "algebra-check"},
                      {"config", c}, {"seed", c.at("seed")}};
  out.document["cutoffs"] = cutoffs;
  out.document["tolerances"] = {{"algebra", tol}, {"gate", gate_tol}, {"ancilla", anc_tol}};
  out.document["results"] = {{"checks", list}, {"gates", gates}};
  out.document["passed"] = ok;
  return out;
}

}  // namespace tqp::cli

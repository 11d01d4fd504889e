#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tqp/encoding.hpp"
#include "tqp/linalg.hpp"
#include "tqp/thermal.hpp"

using namespace tqp;

namespace {

// |+⟩_A ⊗ (α|2m+1, 2n⟩ + β|2n, 2m+1⟩).
Vector code_state(std::size_t d, std::size_t m, std::size_t n, cplx alpha, cplx beta) {
  Vector modes = Vector::Zero(static_cast<Eigen::Index>(d * d));
  modes((2 * m + 1) * d + 2 * n) += alpha;
  modes((2 * n) * d + 2 * m + 1) += beta;
  return kron(plus_state(), modes);
}

Vector random_code_state(std::size_t d, std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  cplx a(g(rng), g(rng)), b(g(rng), g(rng));
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  return code_state(d, m, n, a / norm, b / norm);
}

// Independent e^{iθO} for an involution via its eigen-decomposition.
Matrix exp_i_theta(const Matrix& o, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(o);
  const Vector phases = (kI * theta * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST(LogicalOperators, ActionOnLowestBasis) {
  const std::size_t d = 4;
  const SpaceLayout lay(1, {d, d});
  const LogicalQubitRef ref{0, 0};
  const Matrix z = logical_z(lay, ref).matrix();
  const Matrix x = logical_x(lay, ref).matrix();
  const Vector v10 = code_state(d, 0, 0, 1.0, 0.0);
  const Vector v01 = code_state(d, 0, 0, 0.0, 1.0);
  EXPECT_LT((z * v10 - v10).norm(), 1e-15);
  EXPECT_LT((z * v01 + v01).norm(), 1e-15);
  EXPECT_LT((x * v10 - v01).norm(), 1e-15);
  EXPECT_THROW(logical_z(SpaceLayout(1, {d}), ref), LayoutError);
}

TEST(LogicalOperators, AnticommuteOnCodeSpace) {
  const std::size_t d = 8;
  const SpaceLayout lay(1, {d, d});
  const Matrix z = logical_z(lay, {0, 0}).matrix();
  const Matrix x = logical_x(lay, {0, 0}).matrix();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Vector psi = random_code_state(d, 1, 2, rng);
    EXPECT_LT((anticommutator(x, z) * psi).norm(), 1e-14);
  }
  // Off the code space the anticommutator need not vanish.
  Vector even_even = Vector::Zero(2 * d * d);
  even_even(2 * d + 4) = 1.0;
  EXPECT_GT((anticommutator(x, z) * even_even).norm(), 1.0);
}

TEST(Gates, ZeroAngleIsIdentity) {
  const SpaceLayout lay(1, {6, 6});
  const Matrix id = Matrix::Identity(72, 72);
  const Matrix c = controlled_parity(lay, 0, 1).matrix();
  // U(0) = Ĉ Ĉ = I and B† Ĉ Ĉ B = I.
  EXPECT_LT(max_abs(gate_uz(lay, {0, 0}, 0.0).to_operator().matrix() - id), 1e-12);
  EXPECT_LT(max_abs(gate_ux(lay, {0, 0}, 0.0).to_operator().matrix() - id), 1e-12);
  EXPECT_LT(max_abs(c * c - id), 1e-15);
}

TEST(Gates, UzQuarterTurnPhases) {
  const std::size_t d = 8;
  const SpaceLayout lay(1, {d, d});
  const auto gate = gate_uz(lay, {0, 0}, kPi / 2);
  Vector a = code_state(d, 0, 0, 1.0, 0.0);
  Vector b = code_state(d, 0, 0, 0.0, 1.0);
  const Vector a0 = a, b0 = b;
  gate.apply(a);
  gate.apply(b);
  EXPECT_LT((a - kI * a0).norm(), 1e-12);
  EXPECT_LT((b + kI * b0).norm(), 1e-12);
  const Matrix oracle = kron(Matrix::Identity(2, 2), exp_i_theta(kron(Matrix::Identity(d, d), parity_matrix(d)), kPi / 2));
  EXPECT_LT((oracle * a0 - a).norm(), 1e-10);
}

TEST(Gates, UxMatchesSwapExponential) {
  const std::size_t d = 6;
  const SpaceLayout lay(1, {d, d});
  const Matrix s = two_mode_swap(SpaceLayout(0, {d, d}), 0, 1).matrix();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 10; ++i) {
    const double theta = angle(rng);
    const Matrix oracle = kron(Matrix::Identity(2, 2), (std::cos(theta) * Matrix::Identity(d * d, d * d) + kI * std::sin(theta) * s).eval());
    for (auto [m, n] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}, std::pair{2, 0}}) {
      Vector psi = random_code_state(d, m, n, rng);
      const Vector expect = oracle * psi;
      gate_ux(lay, {0, 0}, theta).apply(psi);
      EXPECT_LT((psi - expect).norm(), 1e-9);
      EXPECT_GE(plus_fidelity(HybridState::pure(lay, psi), 0), 1.0 - 1e-10);
    }
  }
}

TEST(Gates, UzzMatchesParityProductExponential) {
  const std::size_t d = 4;
  const SpaceLayout lay(1, {d, d, d, d});
  const Matrix p = parity_matrix(d);
  const Matrix id = Matrix::Identity(d, d);
  const Matrix zz = kron(kron(id, p), kron(id, p));
  const double theta = 0.43;
  const Matrix oracle = kron(Matrix::Identity(2, 2), exp_i_theta(zz, theta));
  std::vector<std::size_t> digits{0, 1, 2, 0, 3};
  Vector psi = HybridState::basis(lay, digits).vector();
  digits[0] = 1;
  psi = (psi + HybridState::basis(lay, digits).vector()) / std::sqrt(2.0);
  Vector out = psi;
  gate_uzz(lay, {0, 0}, {1, 0}, theta).apply(out);
  EXPECT_LT((out - oracle * psi).norm(), 1e-10);
  EXPECT_GE(plus_fidelity(HybridState::pure(lay, out), 0), 1.0 - 1e-10);
}

TEST(Gates, TotalParityConserved) {
  const std::size_t d = 6;
  const SpaceLayout lay(1, {d, d});
  const Matrix pp = kron(Matrix::Identity(2, 2), kron(parity_matrix(d), parity_matrix(d)).eval());
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Vector psi(2 * d * d);
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(g(rng), g(rng));
  psi = kron(plus_state(), psi.head(d * d).normalized());
  const double before = (psi.adjoint() * pp * psi)(0).real();
  for (const auto& gate : {gate_uz(lay, {0, 0}, 0.7), gate_ux(lay, {0, 0}, -1.2)}) {
    Vector out = psi;
    gate.apply(out);
    EXPECT_NEAR((out.adjoint() * pp * out)(0).real(), before, 1e-10);
  }
}

TEST(Gates, RejectAncillaNotInPlus) {
  const std::size_t d = 4;
  const SpaceLayout lay(1, {d, d});
  const auto st = HybridState::basis(lay, std::vector<std::size_t>{0, 1, 0});
  EXPECT_THROW(parity_measurement_branches(st, 0, 1), StateError);
}

TEST(ExponentialHermitian, ReferenceCases) {
  const std::size_t d = 5;
  const Matrix p = parity_matrix(d);
  EXPECT_LT(max_abs(exponential_hermitian_unitary(p, kPi / 2) - kI * p), 1e-15);
  const Matrix s = two_mode_swap(SpaceLayout(0, {d, d}), 0, 1).matrix();
  EXPECT_LT(max_abs(exponential_hermitian_unitary(s, kPi) + Matrix::Identity(d * d, d * d)), 1e-15);
  const Matrix pp = kron(p, p);
  EXPECT_LT(max_abs(exponential_hermitian_unitary(pp, 0.3) - expm(kI * 0.3 * pp)), 1e-12);
  EXPECT_THROW(exponential_hermitian_unitary(number_matrix(d), 0.3), std::invalid_argument);
}

TEST(ParityMeasurement, VacuumSuperpositionAndThermal) {
  const std::size_t d = 6;
  const SpaceLayout lay(1, {d});
  const auto vac = HybridState::pure(lay, kron(plus_state(), Vector::Unit(d, 0).eval()));
  const auto br = parity_measurement_branches(vac, 0, 0);
  ASSERT_EQ(br.size(), 2u);
  EXPECT_EQ(br[0].outcome, +1);
  EXPECT_NEAR(br[0].probability, 1.0, 1e-15);
  EXPECT_FALSE(br[1].post_state.has_value());

  Vector sup = (Vector::Unit(d, 0) + Vector::Unit(d, 1)) / std::sqrt(2.0);
  const auto sup_br = parity_measurement_branches(HybridState::pure(lay, kron(plus_state(), sup)), 0, 0);
  EXPECT_NEAR(sup_br[0].probability, 0.5, 1e-15);
  EXPECT_NEAR(sup_br[1].probability, 0.5, 1e-15);
  const auto post_minus = trace_out_qubits(*sup_br[1].post_state);
  EXPECT_NEAR(post_minus.populations()(1), 1.0, 1e-14);

  const auto th = thermal_state(ThermalSpec::with_tail(1.0));
  const std::size_t dt = th.layout().cutoff(0);
  const auto hybrid = tensor_product(HybridState::pure(SpaceLayout(1, {}), plus_state()), th);
  const auto forced = parity_measurement_forced(hybrid, 0, 0, +1);
  EXPECT_NEAR(forced.probability, 2.0 / 3.0, 1e-8);
  const RealVector pops = trace_out_qubits(*forced.post_state).populations();
  const RealVector even = even_populations(1.0, dt);
  for (std::size_t k = 0; k < dt; ++k) EXPECT_NEAR(pops(k), even(k), 1e-8);
}

TEST(ParityMeasurement, NondemolitionRepeat) {
  const auto th = thermal_state(ThermalSpec::with_tail(0.5, 1e-8, 8));
  const auto st = tensor_product(HybridState::pure(SpaceLayout(1, {}), plus_state()), th);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto first = parity_measurement(st, 0, 0, rng);
    const auto again = parity_measurement_branches(*first.post_state, 0, 0);
    for (const auto& b : again) {
      if (b.outcome == first.outcome) EXPECT_NEAR(b.probability, 1.0, 1e-10);
    }
  }
}

TEST(Variants, IdentityAndBeamSplitterConjugation) {
  const std::size_t d = 6;
  const SpaceLayout lay(1, {d, d});
  const LogicalQubitRef ref{0, 0};
  const auto zl = logical_z(lay, ref);
  EXPECT_LT(max_abs(variant_conjugate(EncodingVariant::identity(), ref, zl).matrix() - zl.matrix()), 1e-15);

  const Matrix v = local::beam_splitter_5050(SpaceLayout(0, {d, d}), 0, 1).matrix();
  const EncodingVariant var(v);
  const double theta = 0.61;
  const Matrix vz = variant_conjugate(var, ref, zl).matrix();
  const Matrix oracle = expm(kI * theta * vz);
  // Q^V basis: V applied to Fock code states on complete blocks.
  const Matrix vfull = kron(Matrix::Identity(2, 2), v);
  std::mt19937_64 rng(8);
  for (auto [m, n] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}}) {
    const Vector psi = vfull * random_code_state(d, m, n, rng);
    Vector out = psi;
    gate_uz(lay, ref, theta, var).apply(out);
    EXPECT_LT((out - oracle * psi).norm(), 1e-9);
  }
  EXPECT_THROW(EncodingVariant(number_matrix(4)), std::invalid_argument);
}

TEST(Variants, PauliAlgebraAfterConjugation) {
  const std::size_t d = 6;
  const SpaceLayout lay(1, {d, d});
  const LogicalQubitRef ref{0, 0};
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const SpaceLayout two(0, {d, d});
  for (int i = 0; i < 10; ++i) {
    const Matrix v = local::beam_splitter(two, 0, 1, u(rng)).matrix() *
                     kron(local::phase_shift(SpaceLayout(0, {d}), 0, u(rng)).matrix(), Matrix::Identity(d, d)) *
                     local::beam_splitter(two, 0, 1, u(rng)).matrix();
    const EncodingVariant var(v);
    const Matrix z = variant_conjugate(var, ref, logical_z(lay, ref)).matrix();
    const Matrix x = variant_conjugate(var, ref, logical_x(lay, ref)).matrix();
    const Matrix vfull = kron(Matrix::Identity(2, 2), v);
    const Vector zero = vfull * code_state(d, 0, 1, 1.0, 0.0);
    const Vector one = vfull * code_state(d, 0, 1, 0.0, 1.0);
    EXPECT_LT((z * zero - zero).norm(), 1e-12);
    EXPECT_LT((z * one + one).norm(), 1e-12);
    EXPECT_LT((x * zero - one).norm(), 1e-12);
  }
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tqp/fock.hpp"
#include "tqp/linalg.hpp"

using namespace tqp;

namespace {

Vector ket(std::size_t dim, std::size_t index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

}  // namespace

TEST(SpaceLayout, DimensionAndOrdering) {
  const SpaceLayout lay(2, {3, 4});
  EXPECT_EQ(lay.total_dim(), 2u * 2u * 3u * 4u);
  const std::vector<std::size_t> digits{1, 0, 2, 3};
  EXPECT_EQ(lay.index(digits), 1u * 24 + 0u * 12 + 2u * 4 + 3u);
  EXPECT_EQ(lay.digits(lay.index(digits)), digits);
  EXPECT_THROW(SpaceLayout(0, {1}), LayoutError);
}

TEST(Annihilation, LowestDimension) {
  const Matrix a = annihilation(SpaceLayout(0, {2}), 0).matrix();
  EXPECT_EQ(a(0, 1), cplx(1.0));
  EXPECT_EQ(a(0, 0), cplx(0.0));
  EXPECT_EQ(a(1, 0), cplx(0.0));
  EXPECT_EQ(a(1, 1), cplx(0.0));
}

TEST(Annihilation, VacuumAndLadder) {
  for (std::size_t d : {2u, 5u, 12u}) {
    const Matrix a = annihilation(SpaceLayout(0, {d}), 0).matrix();
    EXPECT_LT((a * ket(d, 0)).norm(), 1e-15);
  }
  const Matrix a = annihilation(SpaceLayout(0, {6}), 0).matrix();
  EXPECT_NEAR(std::abs(a(2, 3) - std::sqrt(3.0)), 0.0, 1e-15);
}

TEST(Annihilation, EmbeddedInTensorOrder) {
  const SpaceLayout lay(1, {3, 4});
  const Matrix a1 = annihilation(lay, 1).matrix();
  const Matrix expect = kron(Matrix::Identity(6, 6), annihilation_matrix(4));
  EXPECT_LT(max_abs(a1 - expect), 1e-15);
  EXPECT_THROW(annihilation(lay, 2), LayoutError);
}

TEST(Parity, SignsAndExponential) {
  const SpaceLayout lay(0, {9});
  const Matrix p = parity(lay, 0).matrix();
  EXPECT_EQ(p(0, 0), cplx(1.0));
  EXPECT_EQ(p(1, 1), cplx(-1.0));
  const Matrix n = number(lay, 0).matrix();
  EXPECT_LT(max_abs(expm(kI * kPi * n) - p), 1e-10);
  EXPECT_LT(max_abs(p * p - Matrix::Identity(9, 9)), 1e-15);
  EXPECT_TRUE(parity(lay, 0).is_unitary());
  EXPECT_TRUE(parity(lay, 0).is_hermitian());
}

TEST(Parity, ThermalExpectation) {
  // Σ (−1)^n (1−q) q^n = (1−q)/(1+q) = 1/(2⟨n⟩+1); at ⟨n⟩=1, q=1/2.
  const std::size_t d = 40;  // tail 2^-40
  Matrix rho = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < d; ++k) rho(k, k) = 0.5 * std::pow(0.5, static_cast<double>(k));
  const Matrix p = parity(SpaceLayout(0, {d}), 0).matrix();
  EXPECT_NEAR((p * rho).trace().real(), 1.0 / 3.0, 1e-10);
}

TEST(Displacement, IdentityInverseAndOverlap) {
  const SpaceLayout lay(0, {20});
  EXPECT_LT(max_abs(displacement(lay, 0, 0.0).matrix() - Matrix::Identity(20, 20)), 1e-15);
  const cplx alpha(0.3, 0.0);
  const Matrix d = displacement(lay, 0, alpha).matrix();
  const Matrix dm = displacement(lay, 0, -alpha).matrix();
  EXPECT_LT(max_abs(d * dm - Matrix::Identity(20, 20)), 1e-10);
  EXPECT_NEAR(std::abs(d(0, 0) - std::exp(-0.045)), 0.0, 1e-8);
  // Coherent amplitudes ⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n! for low n.
  double fact = 1.0;
  for (int n = 0; n < 6; ++n) {
    if (n > 0) fact *= n;
    EXPECT_NEAR(std::abs(d(n, 0) - std::exp(-0.045) * std::pow(0.3, n) / std::sqrt(fact)), 0.0, 1e-8);
  }
}

TEST(BeamSplitter, GoldenSignAndNumberConservation) {
  const std::size_t d = 6;
  const SpaceLayout lay(0, {d, d});
  const Matrix b = beam_splitter_5050(lay, 0, 1).matrix();
  const Vector vac = ket(d * d, 0);
  EXPECT_LT((b * vac - vac).norm(), 1e-12);
  // B|1,0⟩ = (|1,0⟩ − |0,1⟩)/√2 with generator (π/4)(a_b a_a† − a_b† a_a).
  const Vector out = b * ket(d * d, 1 * d + 0);
  const Vector expect = (ket(d * d, 1 * d + 0) - ket(d * d, 0 * d + 1)) / std::sqrt(2.0);
  EXPECT_LT((out - expect).norm(), 1e-12);
  const Matrix n_tot = number(lay, 0).matrix() + number(lay, 1).matrix();
  EXPECT_LT(max_abs(commutator(b, n_tot)), 1e-12);
  EXPECT_LT(unitarity_defect(b), 1e-10);
  EXPECT_THROW(beam_splitter_5050(lay, 0, 0), LayoutError);
  EXPECT_THROW(beam_splitter_5050(SpaceLayout(0, {4, 5}), 0, 1), LayoutError);
}

TEST(BeamSplitter, ParityMapsToSwapOnCompleteBlocks) {
  const std::size_t d = 7;
  const SpaceLayout lay(0, {d, d});
  const Matrix b = beam_splitter_5050(lay, 0, 1).matrix();
  const Matrix s = two_mode_swap(lay, 0, 1).matrix();
  const Matrix pb = parity(lay, 1).matrix();
  std::vector<std::size_t> cols;
  for (std::size_t na = 0; na < d; ++na)
    for (std::size_t nb = 0; na + nb < d; ++nb) cols.push_back(na * d + nb);
  EXPECT_LT(max_abs(select_columns(b.adjoint() * pb * b - s, cols)), 1e-12);
}

TEST(Swap, ActionAndConjugation) {
  const std::size_t d = 7;
  const SpaceLayout lay(0, {d, d});
  const Matrix s = two_mode_swap(lay, 0, 1).matrix();
  EXPECT_LT((s * ket(d * d, 2 * d + 5) - ket(d * d, 5 * d + 2)).norm(), 1e-15);
  const Matrix a1 = annihilation(lay, 0).matrix();
  const Matrix a2 = annihilation(lay, 1).matrix();
  EXPECT_LT(max_abs(s * a1 * s.adjoint() - a2), 1e-12);
  EXPECT_EQ(max_abs(s * s - Matrix::Identity(d * d, d * d)), 0.0);
  const Matrix ep = kron(phase_shift(SpaceLayout(0, {d}), 0, 0.7).matrix(),
                         phase_shift(SpaceLayout(0, {d}), 0, 0.7).matrix());
  EXPECT_LT(max_abs(commutator(s, ep)), 1e-10);
}

TEST(ControlledParity, ActionAndMeasurementIdentity) {
  const std::size_t d = 16;
  const SpaceLayout lay(1, {d});
  const Matrix c = controlled_parity(lay, 0, 0).matrix();
  for (std::size_t n = 0; n < d; ++n) EXPECT_LT((c * ket(2 * d, n) - ket(2 * d, n)).norm(), 1e-15);
  EXPECT_LT((c * ket(2 * d, d + 3) + ket(2 * d, d + 3)).norm(), 1e-15);
  EXPECT_EQ(max_abs(c * c - Matrix::Identity(2 * d, 2 * d)), 0.0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Vector psi(d);
  for (std::size_t n = 0; n < d; ++n) psi(n) = cplx(g(rng), g(rng));
  psi.normalize();
  const Matrix p = parity_matrix(d);
  const Matrix id = Matrix::Identity(d, d);
  const Vector lhs = c * kron(plus_state(), psi);
  const Vector rhs = kron(plus_state(), (id + p) * psi / 2.0) + kron(minus_state(), (id - p) * psi / 2.0);
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(Plumbing, ExponentialAdjointCompose) {
  const SpaceLayout lay(1, {4});
  const auto zero = TruncatedOperator(lay, Matrix::Zero(8, 8));
  EXPECT_LT(max_abs(matrix_exponential(zero).matrix() - Matrix::Identity(8, 8)), 1e-15);
  std::mt19937_64 rng(9);
  const TruncatedOperator a(lay, random_matrix(8, rng));
  const TruncatedOperator b(lay, random_matrix(8, rng));
  EXPECT_LT(max_abs(adjoint(compose(a, b)).matrix() - (adjoint(b) * adjoint(a)).matrix()), 1e-12);
  EXPECT_THROW(compose(a, TruncatedOperator::identity(SpaceLayout(0, {8}))), LayoutError);
}

TEST(LocalOperator, ApplyMatchesDenseEmbedding) {
  const SpaceLayout lay(2, {3, 4});
  std::mt19937_64 rng(2);
  const LocalOperator op(lay, {1, 3}, random_matrix(8, rng));
  const Matrix full = tensor_embed(op).matrix();
  const auto n = static_cast<Eigen::Index>(lay.total_dim());
  Vector v = random_matrix(n, rng).col(0);
  Vector w = v;
  op.apply(w);
  EXPECT_LT((w - full * v).norm(), 1e-12);
  Matrix rho = random_matrix(n, rng);
  Matrix r2 = rho;
  op.conjugate(r2);
  EXPECT_LT(max_abs(r2 - full * rho * full.adjoint()), 1e-11);
}

TEST(Unitaries, AllConstructionsWithinTolerance) {
  const SpaceLayout lay(1, {10, 10});
  for (const auto& u : {parity(lay, 0), two_mode_swap(lay, 0, 1), controlled_parity(lay, 0, 1),
                        beam_splitter_5050(lay, 0, 1), displacement(lay, 1, cplx(0.4, 0.1)),
                        qubit_rotation(lay, 0, Pauli::Y, 0.3), phase_shift(lay, 0, 1.1)}) {
    EXPECT_LT(unitarity_defect(u.matrix()), 1e-10);
    EXPECT_TRUE(u.is_unitary());
  }
}

TEST(HybridState, TailRecordedNotNormalizedAway) {
  const SpaceLayout lay(0, {12});
  const Matrix d = displacement(lay, 0, cplx(1.0, 0.0)).matrix();
  const auto vac = HybridState::basis(lay, std::vector<std::size_t>{0});
  EXPECT_EQ(vac.truncation_tail(), 0.0);
  const auto moved = vac.evolved(TruncatedOperator(lay, d));
  EXPECT_GT(moved.truncation_tail(), 0.0);
  EXPECT_LT(moved.truncation_tail(), 1e-6);
  EXPECT_NEAR(moved.trace(), 1.0, 1e-10);
  EXPECT_NO_THROW(moved.validate());
}

TEST(HybridState, ValidationRejectsBadDensity) {
  const SpaceLayout lay(0, {2});
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.5;
  rho(1, 1) = -0.5;
  EXPECT_THROW(HybridState::mixed(lay, rho).validate(), StateError);
  Matrix half = Matrix::Identity(2, 2) * 0.25;
  EXPECT_THROW(HybridState::mixed(lay, half).validate(), StateError);
}

TEST(HybridState, ProjectAndReduce) {
  const SpaceLayout lay(1, {3});
  const Vector psi = kron(plus_state(), ket(3, 2));
  const auto st = HybridState::pure(lay, psi);
  const Matrix rq = st.reduced_qubit(0);
  EXPECT_NEAR(rq(0, 1).real(), 0.5, 1e-15);
  const auto branch = project_qubit(st, 0, plus_state());
  EXPECT_NEAR(branch.trace(), 1.0, 1e-15);
  EXPECT_EQ(branch.layout().qubit_count(), 0u);
}

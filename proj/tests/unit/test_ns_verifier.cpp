#include <cmath>

#include <gtest/gtest.h>

#include "tqp/encoding.hpp"
#include "tqp/linalg.hpp"
#include "tqp/ns_verifier.hpp"

using namespace tqp;

TEST(CollectiveNoise, PhaseReferenceCases) {
  const std::size_t d = 8;
  const SpaceLayout lay(0, {d, d});
  const Matrix p = parity_matrix(d);
  EXPECT_LT(max_abs(collective_noise(NoiseKind::Phase, kPi, lay).matrix() - kron(p, p)), 1e-14);
  const Matrix fwd = collective_noise(NoiseKind::Phase, 0.4, lay).matrix();
  const Matrix back = collective_noise(NoiseKind::Phase, -0.4, lay).matrix();
  EXPECT_LT(max_abs(fwd * back - Matrix::Identity(d * d, d * d)), 1e-14);
  EXPECT_THROW(collective_noise(NoiseKind::Phase, 0.1, SpaceLayout(0, {d})), LayoutError);
}

TEST(CollectiveNoise, SqueezeIdentityAndBudget) {
  const std::size_t d = 30;
  const SpaceLayout lay(0, {d, d});
  EXPECT_LT(max_abs(collective_noise(NoiseKind::Squeeze, 0.0, lay).matrix() - Matrix::Identity(d * d, d * d)),
            1e-15);
  EXPECT_NO_THROW(collective_noise(NoiseKind::Squeeze, 0.05, lay));
  EXPECT_THROW(collective_noise(NoiseKind::Squeeze, 0.35, lay), std::invalid_argument);
  // At ξ = 0.25 the d/3 bound leaves a tail above 1e-6; a lower level is safe.
  EXPECT_GE(squeeze_tail(0.25, d, default_test_level(d)), kSqueezeTail);
  EXPECT_THROW(collective_noise(NoiseKind::Squeeze, 0.25, lay), std::invalid_argument);
  const auto safe = squeeze_safe_level(0.25, d);
  ASSERT_TRUE(safe.has_value());
  EXPECT_LT(*safe, default_test_level(d));
  EXPECT_NO_THROW(collective_noise(NoiseKind::Squeeze, 0.25, lay, *safe));
  EXPECT_LT(squeeze_tail(0.25, d, *safe), kSqueezeTail);
}

TEST(CollectiveNoise, SqueezeUnitaryOnSafeColumns) {
  const std::size_t d = 30;
  const SpaceLayout lay(0, {d, d});
  const Matrix e = collective_noise(NoiseKind::Squeeze, 0.1, lay).matrix();
  const auto cols = tail_safe_columns(lay, d / 3);
  const Matrix sub = select_columns(e, cols);
  const Matrix gram = sub.adjoint() * sub;
  EXPECT_LT(max_abs(gram - Matrix::Identity(gram.rows(), gram.cols())), 1e-6);
}

TEST(Commutation, LogicalOperatorsCommuteWithNoise) {
  const std::size_t d = 24;
  const SpaceLayout lay(0, {d, d});
  // Logical operators on a layout without an ancilla qubit.
  const Matrix pb = kron(Matrix::Identity(d, d), parity_matrix(d));
  const TruncatedOperator z(lay, pb);
  const TruncatedOperator x = two_mode_swap(lay, 0, 1);
  const TruncatedOperator y(lay, kI * x.matrix() * z.matrix());
  for (double phi : {0.3, kPi / 2}) {
    const auto e = collective_noise(NoiseKind::Phase, phi, lay);
    for (const auto* op : {&z, &x, &y}) EXPECT_LT(commutation_check(e, *op), 1e-12);
  }
  const auto s = collective_noise(NoiseKind::Squeeze, 0.1, lay);
  for (const auto* op : {&z, &x, &y}) EXPECT_LT(commutation_check(s, *op), 1e-12);
}

TEST(Commutation, NegativeControlDoesNotCommute) {
  const std::size_t d = 12;
  const SpaceLayout lay(0, {d, d});
  const Matrix a = annihilation_matrix(d);
  const TruncatedOperator quad(lay, kron(Matrix::Identity(d, d), (a + a.adjoint()).eval()));
  EXPECT_GT(commutation_check(collective_noise(NoiseKind::Phase, 0.7, lay), quad), 0.1);
}

TEST(Dfs, NoInvariantSubspaceAtAnyLevel) {
  const auto r = dfs_nonexistence(8, 30, 3);
  ASSERT_EQ(r.levels.size(), 9u);
  EXPECT_TRUE(r.nonexistence_confirmed);
  EXPECT_EQ(r.levels[0].subspace_dim, 1u);
  for (const auto& lv : r.levels) {
    EXPECT_EQ(lv.subspace_dim, lv.excitation + 1);
    EXPECT_EQ(lv.null_dim, 0u);
    EXPECT_GE(lv.smallest_singular, 1e-3);
    EXPECT_GE(lv.random_probe_min, lv.smallest_singular - 1e-12);
  }
  EXPECT_THROW(dfs_nonexistence(8, 10), std::invalid_argument);
}

TEST(NsReport, DefaultGridPasses) {
  const auto r = ns_report({0.3, kPi}, {0.05, 0.2}, 24, 4);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.checks.size(), 2u * 4u);
  for (const auto& c : r.checks) EXPECT_LE(c.residual, r.tolerance);
  EXPECT_GT(r.negative_control.residual, r.negative_threshold);
  const std::string js = ns_report_json(r);
  EXPECT_NE(js.find("negative_control"), std::string::npos);
}

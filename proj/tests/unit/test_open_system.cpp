#include <cmath>

#include <gtest/gtest.h>

#include "tqp/linalg.hpp"
#include "tqp/open_system.hpp"
#include "tqp/thermal.hpp"

using namespace tqp;

namespace {

// Thermal populations cut at exactly d levels and renormalized.
HybridState plus_thermal(double n, std::size_t d) {
  const RealVector p = thermal_populations(n, d);
  Matrix rho = Matrix::Zero(d, d);
  rho.diagonal() = (p / p.sum()).cast<cplx>();
  return tensor_product(HybridState::pure(SpaceLayout(1, {}), plus_state()),
                        HybridState::mixed(SpaceLayout(0, {d}), rho));
}

}  // namespace

TEST(Lindblad, TracelessAndClosedLimit) {
  const std::size_t d = 8;
  const Matrix a = annihilation_matrix(d);
  const Matrix h = number_matrix(d) + 0.1 * (a + a.adjoint());
  Matrix rho = trace_out_qubits(plus_thermal(0.3, d)).density();
  rho(0, 1) = rho(1, 0) = 0.05;
  NoiseParams noise;
  noise.q = 20.0;
  noise.n_th = 0.7;
  EXPECT_LT(std::abs(lindblad_rhs(rho, h, a, noise).trace()), 1e-12);
  const NoiseParams closed;
  EXPECT_LT(max_abs(lindblad_rhs(rho, h, a, closed) + kI * commutator(h, rho)), 1e-14);
  // Superoperator agrees with the direct right-hand side.
  const Matrix sup = lindblad_superoperator(h, a, noise);
  const Eigen::Map<const Vector> vec(rho.data(), rho.size());
  const Vector lhs = sup * vec;
  const Matrix direct = lindblad_rhs(rho, h, a, noise);
  EXPECT_LT((lhs - Eigen::Map<const Vector>(direct.data(), direct.size())).norm(), 1e-12);
}

TEST(Lindblad, SingleExcitationDecayRate) {
  const std::size_t d = 5;
  const Matrix a = annihilation_matrix(d);
  Matrix rho = Matrix::Zero(d, d);
  rho(1, 1) = 1.0;
  NoiseParams noise;
  noise.q = 40.0;
  const Matrix drho = lindblad_rhs(rho, Matrix::Zero(d, d), a, noise);
  EXPECT_NEAR((number_matrix(d) * drho).trace().real(), -1.0 / 40.0, 1e-14);
}

TEST(Lindblad, RejectsInvalidNoise) {
  NoiseParams noise;
  noise.q = -1.0;
  EXPECT_THROW(noise.validate(), std::invalid_argument);
  noise.q = 10.0;
  noise.n_th = -0.5;
  EXPECT_THROW(noise.validate(), std::invalid_argument);
}

TEST(MasterEquation, ThermalSteadyState) {
  const std::size_t d = 20;
  NoiseParams noise;
  noise.q = 10.0;
  noise.n_th = 0.5;
  const auto vac = HybridState::basis(SpaceLayout(0, {d}), std::vector<std::size_t>{0});
  PulseSchedule s;
  s.append(FreeEvolution{20.0 * noise.q});
  MasterOptions opt;
  opt.dt = 0.05;
  const auto r = evolve_master(vac, s, HybridParams{1.0, 0.0}, noise, opt);
  EXPECT_NEAR(r.state.expectation(number_matrix(d)).real(), 0.5, 1e-3);
  EXPECT_LT(r.trace_error, 1e-8);
  EXPECT_LT(r.hermiticity_defect, 1e-10);
  EXPECT_GE(r.min_eigenvalue, -1e-8);
}

TEST(MasterEquation, EmptyScheduleAndClosedConsistency) {
  const std::size_t d = 12;
  const HybridParams p{1.0, 0.04};
  const auto st = plus_thermal(0.3, d);
  const auto same = evolve_master(st, PulseSchedule{}, p, NoiseParams{});
  EXPECT_LT(max_abs(same.state.density() - st.density()), 1e-15);

  // Low-number input keeps the closed-form propagator and the truncated
  // generator in agreement.
  const auto low = HybridState::pure(hybrid_layout(d), kron(plus_state(), Vector::Unit(d, 1).eval()));
  const auto sched = build_h2_sequence(p, 1);
  const auto r = evolve_master(low, sched, p, NoiseParams{});
  const Matrix u = schedule_unitary(p, sched, d);
  const Matrix expect = u * low.to_density() * u.adjoint();
  EXPECT_LT(trace_distance(r.state.density(), expect), 1e-6);
}

TEST(Trajectories, NoNoiseMatchesUnitary) {
  const std::size_t d = 14;
  const HybridParams p{1.0, 0.04};
  const auto sched = build_h2_sequence(p, 1);
  const auto st = HybridState::pure(hybrid_layout(d), kron(plus_state(), Vector::Unit(d, 1).eval()));
  TrajectoryOptions opt;
  opt.trajectories = 3;
  const auto r = jump_unravelling(st, sched, p, NoiseParams{}, opt);
  const Matrix u = schedule_unitary(p, sched, d);
  EXPECT_EQ(r.mean_jumps, 0.0);
  EXPECT_LT(trace_distance(r.mean_density, u * st.to_density() * u.adjoint()), 1e-6);
}

TEST(Trajectories, ReproducibleAcrossThreadCounts) {
  const std::size_t d = 10;
  const HybridParams p{1.0, 0.0};
  NoiseParams noise;
  noise.q = 50.0;
  noise.n_th = 1.0;
  PulseSchedule s;
  s.append(FreeEvolution{10.0});
  const auto st = plus_thermal(0.5, d);
  TrajectoryOptions opt;
  opt.trajectories = 40;
  opt.seed = 99;
  const auto one = jump_unravelling(st, s, p, noise, opt);
  opt.threads = 3;
  const auto three = jump_unravelling(st, s, p, noise, opt);
  EXPECT_EQ(one.mean_jumps, three.mean_jumps);
  EXPECT_EQ(max_abs(one.mean_density - three.mean_density), 0.0);
  opt.seed = 100;
  EXPECT_NE(jump_unravelling(st, s, p, noise, opt).mean_jumps, one.mean_jumps);
  EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(1, 1));
  EXPECT_EQ(trajectory_seed(7, 3), trajectory_seed(7, 3));
}

TEST(Trajectories, ShortTimeJumpProbability) {
  NoiseParams noise;
  noise.q = 100.0;
  noise.n_th = 100.0;
  const double dt = 1e-3;
  for (double n : {0.5, 1.0, 2.0}) {
    const auto th = thermal_state(ThermalSpec::with_tail(n, 1e-10));
    const double expect = jump_rate(n, noise) * dt;
    const double got = short_time_jump_probability(th, HybridParams{1.0, 0.0}, noise, dt);
    EXPECT_NEAR(got / expect, 1.0, 0.05) << "n=" << n;
  }
}

TEST(ParityFidelity, ExactGateIsPerfect) {
  for (double n : {0.0, 0.4, 2.0}) {
    const auto pt = figure3_fidelity(n, FidelityConfig{});
    EXPECT_NEAR(pt.fidelity, 1.0, 1e-9);
    EXPECT_NEAR(pt.p_plus + pt.p_minus, 1.0, 1e-8);
    EXPECT_NEAR(pt.baseline, 1.0 / (n + 1.0), 1e-15);
  }
}

TEST(ParityFidelity, ConfigurationsAndOrdering) {
  const auto cfgs = figure3_configs();
  ASSERT_EQ(cfgs.size(), 3u);
  EXPECT_EQ(cfgs[0].repetitions, 50u);
  EXPECT_NEAR(64.0 * cfgs[1].eta * cfgs[1].eta * 100.0, kPi / 2, 1e-12);
  std::vector<double> f;
  for (const auto& c : cfgs) f.push_back(figure3_fidelity(2.0, c).fidelity);
  EXPECT_GT(f[2], f[1]);
  EXPECT_GT(f[1], f[0]);
  EXPECT_GT(f[0], 1.0 / 3.0);
  const auto pt = figure3_fidelity(2.0, cfgs[0]);
  EXPECT_EQ(pt.cutoff, 36u);
}

TEST(ParityFidelity, EmptyBranchCountsAsOne) {
  const auto exact = figure3_fidelity(0.0, FidelityConfig{});
  EXPECT_LT(exact.p_minus, kDegenerateBranch);
  EXPECT_EQ(exact.fidelity, 1.0);
  // The engineered gate leaks a little weight into the odd outcome, which
  // the fidelity then counts in full.
  const auto engineered = figure3_fidelity(0.0, figure3_configs()[0]);
  EXPECT_GT(engineered.p_minus, kDegenerateBranch);
  EXPECT_LT(engineered.p_minus, 1e-3);
}

TEST(EpsilonTqp, ClosedFormProperties) {
  NoiseParams noise;
  noise.q = 1e6;
  EXPECT_EQ(epsilon_tqp(noise, 0.0, 0.02), 0.0);
  noise.n_th = 100.0;
  const double e1 = epsilon_tqp(noise, 1.0, 0.016);
  EXPECT_NEAR(e1, 301.0 * 9.0 * kPi / (64.0 * 0.016 * 0.016 * 1e6), 1e-12);
  EXPECT_NEAR(epsilon_tqp(noise, 1.0, 0.032), e1 / 4.0, 1e-14);
  EXPECT_NEAR(tqp_gate_time(0.016), 9.0 * kPi / (64.0 * 0.016 * 0.016), 1e-9);
}

TEST(Cooling, RateZerosAndScaling) {
  EXPECT_EQ(cooling_rate(0.02, 1.0, 0.01, 100.0, 0.0, 5.0), 0.0);
  EXPECT_EQ(cooling_rate(0.02, 1.0, 0.01, 100.0, 5.0, 0.0), 0.0);
  NoiseParams noise;
  noise.eta = 0.02;
  noise.q = 1e6;
  noise.n_th = 10.0;
  noise.gamma_dc = 0.01;
  noise.gamma_dp = 100.0;
  const auto r = cooling_comparison(noise, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.ratio, 0.25);
  EXPECT_LE(r.ratio, 4.0);
  EXPECT_NEAR(r.eps_cool, noise.n_th * noise.kappa() / r.gamma_c, 1e-12 * r.eps_cool);
  EXPECT_LT(r.eps_ratio, 0.1);
  EXPECT_TRUE(r.tqp_favoured);
}

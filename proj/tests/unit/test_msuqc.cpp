#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tqp/linalg.hpp"
#include "tqp/msuqc.hpp"

using namespace tqp;

namespace {

// Independent reference: dense 2^K matrices, cos/sin exponentials of Pauli strings.
double reference_a(const LogicalCircuit& c) {
  const Matrix z = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  const Matrix x = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  const Matrix id = Matrix::Identity(2, 2);
  const std::size_t k = c.qubits;
  auto embed = [&](const std::vector<const Matrix*>& factors) {
    Matrix out = Matrix::Identity(1, 1);
    for (const Matrix* f : factors) out = kron(out, *f);
    return out;
  };
  auto single = [&](const Matrix& p, std::size_t q) {
    std::vector<const Matrix*> f(k, &id);
    f[q] = &p;
    return embed(f);
  };
  const Eigen::Index dim = Eigen::Index{1} << k;
  const Matrix eye = Matrix::Identity(dim, dim);
  auto rot = [&](const Matrix& o, double t) -> Matrix { return std::cos(t) * eye + kI * std::sin(t) * o; };
  Vector psi = Vector::Zero(dim);
  psi(0) = 1.0;
  for (const auto& st : c.steps) {
    for (std::size_t j = 0; j + 1 < k; ++j) {
      std::vector<const Matrix*> f(k, &id);
      f[j] = &z;
      f[j + 1] = &z;
      psi = rot(embed(f), st.gamma[j]) * psi;
    }
    for (std::size_t q = 0; q < k; ++q) psi = rot(single(x, q), st.theta[q]) * psi;
    for (std::size_t q = 0; q < k; ++q) psi = rot(single(z, q), st.phi[q]) * psi;
  }
  return std::norm(psi(0));
}

LogicalCircuit one_step(double phi, double theta) {
  LogicalCircuit c;
  c.qubits = 1;
  c.steps.push_back({{phi}, {theta}, {}});
  return c;
}

}  // namespace

TEST(Msuqc, EmptyCircuitGivesOne) {
  LogicalCircuit c;
  EXPECT_NEAR(run_pure(c, {{0, 0}}).a, 1.0, 1e-12);
  EXPECT_NEAR(run_mixed(c, 1.0).a, 1.0, 1e-12);
  EXPECT_NEAR(qubit_space_oracle(c), 1.0, 1e-15);
}

TEST(Msuqc, SingleQubitReferenceAngles) {
  EXPECT_NEAR(run_pure(one_step(0.0, kPi / 2), {{0, 0}}).a, 0.0, 1e-12);
  EXPECT_NEAR(run_pure(one_step(1.1, 0.0), {{1, 0}}).a, 1.0, 1e-12);
  EXPECT_NEAR(run_pure(one_step(0.3, kPi / 4), {{0, 1}}).a, 0.5, 1e-12);
  EXPECT_NEAR(qubit_space_oracle(one_step(0.3, kPi / 4)), 0.5, 1e-14);
}

TEST(Msuqc, TwoQubitZZLayer) {
  LogicalCircuit c;
  c.qubits = 2;
  c.steps.push_back({{0.0, 0.0}, {kPi / 4, 0.0}, {kPi / 4}});
  c.steps.push_back({{0.2, -0.4}, {0.0, kPi / 4}, {kPi / 4}});
  const double ref = reference_a(c);
  EXPECT_NEAR(qubit_space_oracle(c), ref, 1e-12);
  EXPECT_NEAR(run_pure(c, {{0, 0}, {1, 0}}).a, ref, 1e-10);
  EXPECT_NEAR(run_mixed(c, 0.5).a, ref, 1e-6);
}

TEST(Msuqc, OracleMatchesIndependentReference) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10; ++i) {
    const auto c = random_circuit(1 + i % 3, 3, rng);
    EXPECT_NEAR(qubit_space_oracle(c), reference_a(c), 1e-12);
  }
}

TEST(Msuqc, PureBasesAgreeAndStayInCodeSpace) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    const auto c = random_circuit(1, 3, rng);
    const double ref = reference_a(c);
    for (auto b : {std::pair<std::size_t, std::size_t>{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
      const auto r = run_pure(c, {b});
      EXPECT_NEAR(r.a, ref, 1e-9);
      EXPECT_LT(r.leakage, 1e-10);
      EXPECT_GE(r.min_ancilla_fidelity, 1.0 - 1e-10);
    }
  }
}

TEST(Msuqc, PureRejectsBasisOutsideExactBlock) {
  const auto c = one_step(0.1, 0.2);
  EXPECT_THROW(run_pure(c, {{2, 2}}, 8), CircuitError);
  EXPECT_THROW(run_pure(c, {{0, 0}, {0, 0}}), CircuitError);
}

TEST(Msuqc, MixedEqualsPureForEveryMeanExcitation) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 4; ++i) {
    const auto c = random_circuit(1 + i % 2, 3, rng);
    const double ref = reference_a(c);
    for (double n : {0.0, 0.5, 1.0, 2.0}) {
      const auto r = run_mixed(c, n);
      EXPECT_NEAR(r.a, ref, 1e-6) << "n=" << n;
      EXPECT_EQ(r.mode, RunMode::Mixed);
    }
  }
}

TEST(Msuqc, SectorAndDenseBackendsAgree) {
  std::mt19937_64 rng(12);
  const auto c = random_circuit(1, 2, rng);
  const auto s = run_mixed(c, 1.0, 6, MixedBackend::Sectors);
  const auto d = run_mixed(c, 1.0, 6, MixedBackend::Dense);
  EXPECT_NEAR(s.a, d.a, 1e-10);
  EXPECT_NEAR(s.discarded_weight, d.discarded_weight, 1e-14);
}

TEST(CircuitIo, RoundTripAndRejection) {
  std::mt19937_64 rng(1);
  const auto c = random_circuit(2, 2, rng);
  const auto back = parse_circuit_json(circuit_to_json(c));
  ASSERT_EQ(back.qubits, 2u);
  ASSERT_EQ(back.steps.size(), 2u);
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(back.steps[s].phi, c.steps[s].phi);
    EXPECT_EQ(back.steps[s].theta, c.steps[s].theta);
    EXPECT_EQ(back.steps[s].gamma, c.steps[s].gamma);
  }
  EXPECT_THROW(parse_circuit_json(R"({"qubits": 1, "steps": [], "extra": 0})"), CircuitError);
  EXPECT_THROW(parse_circuit_json(R"({"qubits": 1, "steps": [{"phi": [0.1], "theta": [0.2], "gamma": [0.3]}]})"),
               CircuitError);
  EXPECT_THROW(parse_circuit_json("{"), CircuitError);
}

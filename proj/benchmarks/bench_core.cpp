#include <benchmark/benchmark.h>

#include "tqp/encoding.hpp"
#include "tqp/msuqc.hpp"
#include "tqp/open_system.hpp"
#include "tqp/pulse.hpp"

using namespace tqp;

static void BM_LocalOperatorApply(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const SpaceLayout lay(1, {d, d});
  const auto bs = local::beam_splitter_5050(lay, 0, 1);
  Vector psi = Vector::Ones(static_cast<Eigen::Index>(lay.total_dim())).normalized();
  for (auto _ : state) {
    bs.apply(psi);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_LocalOperatorApply)->Arg(8)->Arg(16)->Arg(24);

static void BM_Expm(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Matrix h = hybrid_hamiltonian(HybridParams{1.0, 0.03}, d);
  for (auto _ : state) benchmark::DoNotOptimize(expm(-kI * 0.7 * h));
}
BENCHMARK(BM_Expm)->Arg(10)->Arg(20)->Arg(40);

static void BM_SequenceUnitary(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const HybridParams p{1.0, 0.02};
  const auto sched = build_h2_sequence(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(schedule_unitary(p, sched, d));
}
BENCHMARK(BM_SequenceUnitary)->Arg(12)->Arg(24);

static void BM_MasterFreeEvolution(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  NoiseParams noise;
  noise.q = 1e3;
  noise.n_th = 0.5;
  const HybridParams p{1.0, 0.02};
  PulseSchedule s;
  s.append(FreeEvolution{1.0});
  const auto st = HybridState::basis(hybrid_layout(d), std::vector<std::size_t>{0, 1});
  MasterOptions opt;
  opt.certify = false;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_master(st, s, p, noise, opt));
}
BENCHMARK(BM_MasterFreeEvolution)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_MixedRun(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto c = random_circuit(static_cast<std::size_t>(state.range(0)), 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(run_mixed(c, 1.0));
}
BENCHMARK(BM_MixedRun)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

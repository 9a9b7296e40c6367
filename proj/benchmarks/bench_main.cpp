#include <benchmark/benchmark.h>

#include "vrp/distributions.hpp"
#include "vrp/oracle.hpp"
#include "vrp/simulator.hpp"
#include "vrp/thresholds.hpp"

using namespace vrp;

static void BM_SolveThresholds(benchmark::State& state) {
  const TypeDistribution d = TypeDistribution::beta(20, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_thresholds(d));
  }
}
BENCHMARK(BM_SolveThresholds)->Unit(benchmark::kMillisecond);

static void BM_BetaQuantile(benchmark::State& state) {
  const TypeDistribution d = TypeDistribution::beta(0.3, 0.2);
  double u = 0.0;
  for (auto _ : state) {
    u = u + 0.618033988749895;
    if (u >= 1.0) u -= 1.0;
    benchmark::DoNotOptimize(d.quantile(u));
  }
}
BENCHMARK(BM_BetaQuantile);

static void BM_MonteCarlo(benchmark::State& state) {
  GameConfig cfg;
  cfg.distribution = TypeDistribution::beta(20, 2);
  cfg.rounds = 3;
  cfg.replications = static_cast<std::uint64_t>(state.range(0));
  cfg.threads = static_cast<unsigned>(state.range(1));
  const Simulator sim(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.run_monte_carlo());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Args({10000, 1})->Args({10000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_BackwardInduction(benchmark::State& state) {
  const DiscreteGame g = build_discrete_game(TypeDistribution::beta(4, 2),
                                             static_cast<std::size_t>(state.range(0)), 1001, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_induction(g));
  }
}
BENCHMARK(BM_BackwardInduction)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

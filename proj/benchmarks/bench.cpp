#include <benchmark/benchmark.h>

#include "minechain/bounds.hpp"
#include "minechain/chain.hpp"
#include "minechain/closedform.hpp"
#include "minechain/lattice.hpp"
#include "minechain/payoff.hpp"
#include "minechain/sim.hpp"

using namespace minechain;

namespace {

void BM_BuildChain(benchmark::State& state) {
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    MiningChain chain =
        build_chain(make_constant_gap(3, 1), make_frontier(), 0.45, depth);
    benchmark::DoNotOptimize(chain.states.data());
  }
}
BENCHMARK(BM_BuildChain)->Arg(50)->Arg(200)->Arg(800);

void BM_Stationary(benchmark::State& state) {
  int depth = static_cast<int>(state.range(0));
  MiningChain chain =
      build_chain(make_constant_gap(3, 1), make_frontier(), 0.45, depth);
  for (auto _ : state) {
    Distribution pi = stationary(chain);
    benchmark::DoNotOptimize(pi.p.data());
  }
}
BENCHMARK(BM_Stationary)->Arg(50)->Arg(200)->Arg(800);

void BM_ExactMixing(benchmark::State& state) {
  MiningChain chain =
      build_chain(make_constant_gap(2, 0), make_frontier(), 0.5, 30);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_mixing_time(chain, 1e-3));
  }
}
BENCHMARK(BM_ExactMixing);

void BM_CornerCounts(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ConstantGapCounts counts = count_constant_gap(d, 5, 3);
    benchmark::DoNotOptimize(counts.n00.log_value);
  }
}
BENCHMARK(BM_CornerCounts)->Arg(100)->Arg(400);

void BM_ClosedFormSweep(benchmark::State& state) {
  for (auto _ : state) {
    RhoPair rho = rho_const_gap(49, 0.3);
    benchmark::DoNotOptimize(rho.rho1);
  }
}
BENCHMARK(BM_ClosedFormSweep);

void BM_SimulateTurns(benchmark::State& state) {
  SimConfig config;
  config.policy1 = make_constant_gap(2, 1);
  config.policy2 = make_frontier();
  config.p1 = 0.45;
  config.turns = static_cast<std::uint64_t>(state.range(0));
  config.seed = 7;
  for (auto _ : state) {
    SimStats stats = run(config);
    benchmark::DoNotOptimize(stats.g1_hat);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(config.turns));
}
BENCHMARK(BM_SimulateTurns)->Arg(100000)->Arg(1000000);

void BM_RoundsToHit(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  MiningChain chain =
      build_chain(make_constant_gap(4, 2), make_frontier(), 0.5, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_rounds_to_hit(chain, d));
  }
}
BENCHMARK(BM_RoundsToHit)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();

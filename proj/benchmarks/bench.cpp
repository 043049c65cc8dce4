#include <benchmark/benchmark.h>

#include "imids/engine.hpp"
#include "imids/topology.hpp"

using namespace imids;

namespace {

ScenarioConfig stock(int nodes, Mode mode) {
  ScenarioConfig c;
  c.seed = 42;
  c.mode = mode;
  c.deployment.node_count = nodes;
  return c;
}

void BM_Election(benchmark::State& state) {
  DeploymentConfig d;
  d.node_count = static_cast<int>(state.range(0));
  SeededRng rng(7);
  const auto nodes = deploy(d, rng);
  const auto g = build_graph(nodes, d.transmission_range);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_cluster_coordinators(nodes, g, {0, 8}));
  }
}
BENCHMARK(BM_Election)->Arg(50)->Arg(100)->Arg(200);

void BM_BuildGraph(benchmark::State& state) {
  DeploymentConfig d;
  d.node_count = static_cast<int>(state.range(0));
  SeededRng rng(7);
  const auto nodes = deploy(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(nodes, d.transmission_range));
}
BENCHMARK(BM_BuildGraph)->Arg(70)->Arg(200);

void BM_Initialize(benchmark::State& state) {
  const auto c = stock(static_cast<int>(state.range(0)), Mode::Imids);
  for (auto _ : state) benchmark::DoNotOptimize(initialize(c));
}
BENCHMARK(BM_Initialize)->Arg(70)->Arg(200);

void BM_RunRound(benchmark::State& state) {
  const auto c = stock(70, static_cast<Mode>(state.range(0)));
  auto st = initialize(c);
  for (auto _ : state) {
    if (st.round >= 200) {
      state.PauseTiming();
      st = initialize(c);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(run_round(st));
  }
}
BENCHMARK(BM_RunRound)->Arg(static_cast<int>(Mode::Imids))->Arg(static_cast<int>(Mode::Itids));

void BM_Simulation(benchmark::State& state) {
  auto c = stock(static_cast<int>(state.range(0)), Mode::Imids);
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(c));
}
BENCHMARK(BM_Simulation)->Arg(70)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

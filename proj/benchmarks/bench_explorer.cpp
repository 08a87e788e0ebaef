#include <benchmark/benchmark.h>

#include "csmsim/explorer.hpp"
#include "csmsim/scenario.hpp"

namespace {

void explore_depth(benchmark::State& state) {
  csmsim::ExplorationConfig cfg;
  cfg.depth = static_cast<unsigned>(state.range(0));
  std::uint64_t states = 0;
  for (auto _ : state) states = csmsim::explore(cfg).states;
  state.counters["states"] = static_cast<double>(states);
  state.counters["states_per_s"] =
      benchmark::Counter(static_cast<double>(states) * static_cast<double>(state.iterations()),
                         benchmark::Counter::kIsRate);
}

void canonical_encoding(benchmark::State& state) {
  const auto world = csmsim::initial_world(csmsim::ExplorationConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(csmsim::canonical_encoding(world));
}

void happy_path(benchmark::State& state) {
  const auto scenario = *csmsim::builtin_scenario("happy_path");
  for (auto _ : state) benchmark::DoNotOptimize(csmsim::run_scenario(scenario).exit_code);
}

}  // namespace

BENCHMARK(explore_depth)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(canonical_encoding);
BENCHMARK(happy_path)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();

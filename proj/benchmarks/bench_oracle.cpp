#include <benchmark/benchmark.h>

#include "d2dra/channel_model.hpp"
#include "d2dra/grid_oracle.hpp"

using namespace d2dra;

namespace {

ChannelInstance default_instance(std::uint64_t seed) {
  SystemConfig config;
  RandomStream rng(seed);
  return generate_instance(place_users(config, rng), config, rng);
}

}  // namespace

// Full sweep cost as a function of grid resolution (N = M = 2).
static void BM_GridSearch(benchmark::State& state) {
  SystemConfig config;
  const ChannelInstance inst = default_instance(17);
  GridSpec grid;
  grid.k_total = static_cast<int>(state.range(0));
  grid.k_split = grid.k_total;
  std::uint64_t evals = 0;
  for (auto _ : state) {
    const OracleSolution sol = grid_search(inst, Goal::kMaxSe, grid, config);
    evals = sol.evaluations;
    benchmark::DoNotOptimize(sol.objective);
  }
  state.counters["joint_evals"] = static_cast<double>(evals);
}
BENCHMARK(BM_GridSearch)->Arg(11)->Arg(21)->Arg(51)->Unit(benchmark::kMillisecond);

// The three-goal sweep shares the physics, so it should cost about the same
// as a single-goal search.
static void BM_GridSearchMulti(benchmark::State& state) {
  SystemConfig config;
  const ChannelInstance inst = default_instance(17);
  GridSpec grid;
  grid.k_total = 51;
  grid.k_split = 51;
  const std::vector<Goal> goals = {Goal::kMaxSe, Goal::kMaxEe, Goal::kMinPw};
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_search_multi(inst, goals, grid, config));
  }
}
BENCHMARK(BM_GridSearchMulti)->Unit(benchmark::kMillisecond);

static void BM_GridSearchThreads(benchmark::State& state) {
  SystemConfig config;
  const ChannelInstance inst = default_instance(17);
  OracleOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_search(inst, Goal::kMaxSe, GridSpec{}, config, options));
  }
}
BENCHMARK(BM_GridSearchThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

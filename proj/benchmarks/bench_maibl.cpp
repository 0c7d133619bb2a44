#include <benchmark/benchmark.h>

#include <vector>

#include "maibl/env.hpp"
#include "maibl/episode.hpp"
#include "maibl/experiment.hpp"
#include "maibl/memory.hpp"

namespace {

using namespace maibl;

// Blending cost against the number of stored records for one observation
// (the hot path: every action selection blends all options).
void BM_BlendAll(benchmark::State& state) {
  const long records = state.range(0);
  MemoryStore store(5, MemoryParams::make(0.5, 0.25, 0.1));
  const double pool[] = {0.1, 0.8, -0.05, -0.01, 0.79, 3.0};
  TimeT t = 1;
  for (long i = 0; i < records; ++i) {
    store.record({42, static_cast<int>(i % 5)}, pool[i % 6], t);
    ++t;
  }
  Rng rng(7);
  std::vector<double> values(5);
  for (auto _ : state) {
    store.blend_all(42, t, rng, values);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * records);
}
BENCHMARK(BM_BlendAll)->Arg(8)->Arg(64)->Arg(512)->Arg(4096);

void BM_MemoryRecord(benchmark::State& state) {
  const double pool[] = {0.1, 0.8, -0.05, -0.01, 0.79, 3.0};
  MemoryStore store(5, MemoryParams::make(0.5, 0.25, 0.1));
  TimeT t = 1;
  std::uint64_t i = 0;
  for (auto _ : state) {
    store.record({i % 257, static_cast<int>(i % 5)}, pool[i % 6], t);
    ++t;
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MemoryRecord);

// Raw environment stepping under a random walk (rarely delivers; resets
// when it does).
void BM_EnvStep(benchmark::State& state) {
  const GridMap& map = GridMap::default_map();
  const Scenario& scenario = Scenario::builtin(1);
  CmotpEnv env(map, scenario, 11);
  Rng actions(3);
  for (auto _ : state) {
    const StepResult r = env.step(static_cast<Action>(actions.next_below(5)),
                                  static_cast<Action>(actions.next_below(5)));
    benchmark::DoNotOptimize(r.penalty[0]);
    if (env.done()) env.reset();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep);

// Whole learning episodes (selection + environment + learning both agents);
// items = environment steps, so later iterations get cheaper as the policy
// sharpens. One agent pair persists across iterations like within a run.
void BM_Episode(benchmark::State& state) {
  ExperimentConfig config;
  config.model = state.range(0) == 0 ? "greedy-maibl" : "q";
  const auto a0 = make_agent(config, 0, 0);
  const auto a1 = make_agent(config, 1, 0);
  CmotpEnv env(GridMap::default_map(), Scenario::builtin(config.scenario),
               env_seed(config, 0));
  int episode = 0;
  long steps = 0;
  for (auto _ : state) {
    const EpisodeTrace t = run_episode(env, *a0, *a1, 5000, ++episode);
    steps += t.steps;
    benchmark::DoNotOptimize(t.reward);
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_Episode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "brox/analytic.hpp"
#include "brox/environment.hpp"
#include "brox/rng.hpp"
#include "brox/scale.hpp"
#include "brox/simulate.hpp"

using namespace brox;

namespace {

const Environment& bm_env() {
  static const Environment env = generate_two_sided_bm(GridSpec(-8.0, 8.0, 0.01), 7);
  return env;
}

void BM_GenerateEnvironment(benchmark::State& state) {
  const GridSpec grid(-static_cast<double>(state.range(0)), static_cast<double>(state.range(0)), 0.01);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_two_sided_bm(grid, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.node_count()));
}
BENCHMARK(BM_GenerateEnvironment)->Arg(8)->Arg(64);

void BM_BuildScale(benchmark::State& state) {
  const Environment& env = bm_env();
  for (auto _ : state) benchmark::DoNotOptimize(build_scale(env));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(env.grid().node_count()));
}
BENCHMARK(BM_BuildScale);

void BM_InverseScale(benchmark::State& state) {
  const Environment& env = bm_env();
  const ScaleMap sm = build_scale(env);
  Rng rng(1);
  for (auto _ : state) {
    const double v = sm.s_min() + (sm.s_max() - sm.s_min()) * uniform01(rng);
    benchmark::DoNotOptimize(inverse_scale(sm, env, v));
  }
}
BENCHMARK(BM_InverseScale);

void BM_StandardNormal(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(standard_normal(rng));
}
BENCHMARK(BM_StandardNormal);

// One passage leg of B from 0 to 2 observed at 1; reports Brownian steps per second.
void BM_WalkLeg(benchmark::State& state) {
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.bandwidth = 1e-2;
  Rng rng(2);
  std::int64_t steps = 0;
  for (auto _ : state) {
    const LegResult leg = walk_leg(0.0, 2.0, 1.0, cfg, rng);
    steps += static_cast<std::int64_t>(leg.steps);
    benchmark::DoNotOptimize(leg.band_count);
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_WalkLeg)->Unit(benchmark::kMicrosecond);

void BM_BroxIncrementSample(benchmark::State& state) {
  const Environment& env = bm_env();
  const ScaleMap sm = build_scale(env);
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.bandwidth = 1e-2;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(brox_increment_sample(env, sm, 1.0, 2.0, 4.0, cfg, rng));
}
BENCHMARK(BM_BroxIncrementSample)->Unit(benchmark::kMicrosecond);

void BM_DirectIncrementSampler(benchmark::State& state) {
  const IncrementLaw law{1.0 / 6.0, 1.0 / 3.0};
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(sample_increment(law, rng));
}
BENCHMARK(BM_DirectIncrementSampler);

void BM_IncrementLaw(benchmark::State& state) {
  const Environment& env = bm_env();
  const ScaleMap sm = build_scale(env);
  for (auto _ : state) benchmark::DoNotOptimize(increment_law(sm, env, 1.234, 2.345, 3.456));
}
BENCHMARK(BM_IncrementLaw);

}  // namespace

BENCHMARK_MAIN();

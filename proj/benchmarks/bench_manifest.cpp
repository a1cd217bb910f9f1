// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "dcscene/manifest.hpp"
#include "dcscene/synthbench.hpp"

using namespace dcscene;

static void DeterministicShuffle(benchmark::State& state) {
  std::vector<SampleId> ids;
  for (int64_t i = 0; i < state.range(0); ++i) ids.push_back("id" + std::to_string(i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shuffle_deterministic(ids, 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(DeterministicShuffle)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void PoolDigest(benchmark::State& state) {
  std::vector<SampleId> ids;
  for (int64_t i = 0; i < state.range(0); ++i) ids.push_back("id" + std::to_string(i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pool_digest(ids));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(PoolDigest)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void SynthGeneration(benchmark::State& state) {
  SynthConfig cfg;
  cfg.n_scenes = std::size_t(state.range(0));
  cfg.captions_per_scene = 20;
  cfg.dim = 32;
  cfg.corrupt_fraction = 0.2;
  cfg.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_synth_pairs(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20);
}
BENCHMARK(SynthGeneration)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

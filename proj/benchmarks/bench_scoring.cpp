// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "dcscene/scoring.hpp"

using namespace dcscene;

namespace {

EmbeddingTable random_table(std::mt19937& rng, std::size_t count, std::size_t dim,
                            const char* prefix) {
  std::uniform_real_distribution<float> dist(-1.f, 1.f);
  EmbeddingTable t;
  t.count = count;
  t.dim = dim;
  t.rows.resize(count * dim);
  for (auto& x : t.rows) x = dist(rng);
  for (std::size_t i = 0; i < count; ++i)
    t.ids.push_back(std::string(prefix) + std::to_string(i));
  return t;
}

std::vector<JoinedSample> pair_up(const EmbeddingTable& scenes,
                                  const EmbeddingTable& texts) {
  std::vector<JoinedSample> samples;
  samples.reserve(texts.count);
  for (std::size_t j = 0; j < texts.count; ++j)
    samples.push_back({texts.ids[j], scenes.ids[j % scenes.count], j % scenes.count, j,
                       1.0});
  return samples;
}

}  // namespace

static void ScalarClipScore(benchmark::State& state) {
  std::mt19937 rng(1);
  const auto dim = std::size_t(state.range(0));
  const auto scenes = random_table(rng, 1, dim, "s");
  const auto texts = random_table(rng, 1, dim, "t");
  for (auto _ : state) {
    benchmark::DoNotOptimize(clip_score(scenes.row(0), texts.row(0), ScorePolicy::raw));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(ScalarClipScore)->Arg(128)->Arg(512)->Arg(1024);

static void BatchScoreAll(benchmark::State& state) {
  std::mt19937 rng(2);
  const auto n = std::size_t(state.range(0));
  const auto scenes = random_table(rng, 256, 512, "s");
  const auto texts = random_table(rng, n, 512, "t");
  const auto samples = pair_up(scenes, texts);
  const auto policy = state.range(1) ? ScorePolicy::cosine : ScorePolicy::raw;
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_all(scenes, texts, samples, policy));
  }
  state.SetItemsProcessed(state.iterations() * int64_t(n));
}
BENCHMARK(BatchScoreAll)
    ->Args({10000, 0})
    ->Args({10000, 1})
    ->Args({100000, 0})
    ->Args({100000, 1})
    ->Unit(benchmark::kMillisecond);

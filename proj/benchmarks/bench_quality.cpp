// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "dcscene/curriculum.hpp"
#include "dcscene/quality.hpp"

using namespace dcscene;

namespace {

std::vector<QualityPoint> random_points(std::size_t n) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> score(-1.0, 1.0);
  std::uniform_real_distribution<double> loss(0.0, 12.0);
  std::vector<QualityPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({"p" + std::to_string(i), "sc" + std::to_string(i % 101),
                   score(rng), loss(rng)});
  return pts;
}

}  // namespace

static void Percentile(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> values(std::size_t(state.range(0)));
  for (auto& v : values) v = dist(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(percentile(values, 95.0));
  }
}
BENCHMARK(Percentile)->Arg(1000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMicrosecond);

static void DualFilter(benchmark::State& state) {
  const auto pts = random_points(std::size_t(state.range(0)));
  const auto b = compute_bounds(pts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter_diq(pts, b));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(DualFilter)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void GridPartition(benchmark::State& state) {
  const auto pts = random_points(std::size_t(state.range(0)));
  const auto b = compute_bounds(pts);
  const double ds = (b.s_max - b.s_min) / 3.0;
  const double dl = (b.l_max - b.l_min) / 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_partition(pts, b, ds, dl));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(GridPartition)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void RankQuality(benchmark::State& state) {
  const auto pts = random_points(std::size_t(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_quality(pts, QualityRank{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(RankQuality)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

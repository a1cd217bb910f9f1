// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcscene/types.hpp"

namespace dcscene {

/// Percentile-derived band edges over the score and loss axes, together with
/// the percentile ranks that produced them.
struct PercentileBounds {
  double s_min = 0.0;
  double s_max = 0.0;
  double l_min = 0.0;
  double l_max = 0.0;
  double pct_lo = 5.0;
  double pct_hi = 95.0;

  bool operator==(const PercentileBounds&) const = default;
};

/// Linear-interpolation percentile: with v sorted ascending and
/// h = (n-1)*p/100, returns v[floor(h)] + (h-floor(h)) * (v[floor(h)+1] -
/// v[floor(h)]). Exact at p=0 (min) and p=100 (max).
/// Throws UsageError on empty input, NaN values, or p outside [0,100].
double percentile(std::span<const double> values, double p);

/// Band edges at pct_lo/pct_hi over clip scores and caption losses.
/// Throws UsageError on empty input.
PercentileBounds compute_bounds(std::span<const QualityPoint> points,
                                double pct_lo = 5.0, double pct_hi = 95.0);

/// Points whose clip score lies inside the closed [s_min, s_max] band.
std::vector<QualityPoint> filter_dis(std::span<const QualityPoint> points,
                                     const PercentileBounds& b);

/// Points whose caption loss lies inside the closed [l_min, l_max] band.
std::vector<QualityPoint> filter_dil(std::span<const QualityPoint> points,
                                     const PercentileBounds& b);

/// Intersection of both bands: the dual-indicator quality region.
std::vector<QualityPoint> filter_diq(std::span<const QualityPoint> points,
                                     const PercentileBounds& b);

/// Uniform partition of the quality region into n_s x n_l blocks of size
/// delta_s x delta_l. Block lists hold indices into the point list the grid
/// was built from; points exactly on the upper edges land in the last block.
struct QualityGrid {
  PercentileBounds bounds;
  double delta_s = 0.0;
  double delta_l = 0.0;
  std::size_t n_s = 1;
  std::size_t n_l = 1;
  std::vector<std::vector<std::size_t>> blocks;  // n_s * n_l, lexicographic
  std::size_t out_of_region = 0;

  std::size_t block_index(std::size_t i_s, std::size_t i_l) const {
    return i_s * n_l + i_l;
  }
  const std::vector<std::size_t>& block(std::size_t i_s, std::size_t i_l) const {
    return blocks[block_index(i_s, i_l)];
  }
};

/// Assigns every in-region point to block (floor((s-s_min)/delta_s),
/// floor((l-l_min)/delta_l)), clamped into the last block on the upper
/// edges. Out-of-region points are excluded and counted.
/// Throws UsageError on non-positive steps.
QualityGrid grid_partition(std::span<const QualityPoint> points, const PercentileBounds& b,
                           double delta_s, double delta_l);

/// Per-block aggregates. Means are absent (not zero) for empty blocks.
struct BlockStats {
  std::size_t i_s = 0;
  std::size_t i_l = 0;
  std::size_t count = 0;
  std::optional<double> mean_score;
  std::optional<double> mean_loss;
};

/// One entry per grid block in (i_s, i_l) lexicographic order, including
/// empty blocks. `points` must be the list the grid was built from.
std::vector<BlockStats> block_stats(const QualityGrid& grid,
                                    std::span<const QualityPoint> points);

/// CSV with header i_s,i_l,count,mean_score,mean_loss; absent means are
/// empty fields.
std::string block_stats_csv(std::span<const BlockStats> stats);

std::string bounds_to_json(const PercentileBounds& b);
PercentileBounds bounds_from_json(const std::string& text);

}  // namespace dcscene

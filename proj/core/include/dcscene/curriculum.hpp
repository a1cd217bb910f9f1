// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dcscene/quality.hpp"
#include "dcscene/types.hpp"

namespace dcscene {

/// threshold: stage pools shrink as per-stage lower thresholds rise.
/// fraction: stage pools grow as a top-fraction of the quality ranking.
enum class StageMode { threshold, fraction };

StageMode stage_mode_from_string(std::string_view s);
std::string_view to_string(StageMode mode);

/// One curriculum stage. Threshold parameters are derived at selection time
/// from (bounds, k, deltas) via stage_thresholds; fraction stages carry their
/// fraction directly. Epoch ranges are inclusive on both ends.
struct StageConfig {
  std::size_t k = 0;
  StageMode mode = StageMode::fraction;
  double fraction = 1.0;           // fraction mode, in (0, 1]
  bool apply_upper_bounds = true;  // threshold mode
  int epoch_begin = 1;
  int epoch_end = 1;

  bool operator==(const StageConfig&) const = default;
};

/// Per-stage inputs for build_schedule; k is assigned from list position.
struct StageSpec {
  StageMode mode = StageMode::fraction;
  double fraction = 1.0;
  bool apply_upper_bounds = true;
  int epoch_end = 0;
};

/// Contiguous, ascending stages starting at epoch 1 and ending at
/// total_epochs. Immutable after construction.
struct Schedule {
  std::vector<StageConfig> stages;
  int total_epochs = 0;

  bool operator==(const Schedule&) const = default;
};

struct StageThresholds {
  double s_p = 0.0;
  double l_p = 0.0;
};

/// Stage-k lower thresholds: s_p = s_min + k*delta_s, l_p = l_min + k*delta_l.
StageThresholds stage_thresholds(const PercentileBounds& b, std::size_t k,
                                 double delta_s, double delta_l);

/// Stage-k pool in threshold mode: points with clip_score >= s_p and
/// caption_loss >= l_p; with apply_upper_bounds also <= s_max / l_max.
/// Input order preserved. At k=0 with upper bounds this is exactly the
/// dual-indicator quality region.
std::vector<QualityPoint> select_stage_threshold(std::span<const QualityPoint> points,
                                                 const PercentileBounds& b, std::size_t k,
                                                 double delta_s, double delta_l,
                                                 bool apply_upper_bounds);

/// Weights for the combined quality ranking; w_s + w_l must equal 1,
/// both non-negative.
struct QualityRank {
  double w_s = 0.5;
  double w_l = 0.5;
};

/// Orders points by q = w_s*norm(score) + w_l*norm(loss) descending, where
/// norm is min-max over the input set (higher is better on both axes; a
/// degenerate axis contributes 0.5 for every point). Ties break by ascending
/// sample_id, so the result is a total, permutation-independent order.
std::vector<QualityPoint> rank_quality(std::span<const QualityPoint> points,
                                       const QualityRank& r);

/// First ceil(fraction * n) entries of an already-ranked list.
/// Throws UsageError unless 0 < fraction <= 1.
std::vector<QualityPoint> select_top_fraction(std::span<const QualityPoint> ranked,
                                              double fraction);

/// Keeps the k highest-scoring captions per scene (ties by ascending
/// sample_id); scenes with <= k captions keep all. Output stays in input
/// order. Throws UsageError if k == 0.
std::vector<QualityPoint> per_scene_topk(std::span<const QualityPoint> points,
                                         std::size_t k);

/// Validates epoch_ends (strictly ascending, last == total_epochs) and
/// assigns contiguous inclusive ranges starting at epoch 1.
Schedule build_schedule(int total_epochs, std::span<const StageSpec> specs);

/// The built-in scanrefer-default preset: fraction stages 0.25 / 0.50 / 0.75
/// over epochs 1-360 / 361-720 / 721-1080.
Schedule scanrefer_default_schedule();

/// The unique stage whose inclusive epoch range contains `epoch`.
/// Throws UsageError when epoch is outside [1, total_epochs].
const StageConfig& stage_for_epoch(const Schedule& schedule, int epoch);

struct ScoreUpdate {
  SampleId sample_id;
  double clip_score = 0.0;
};

struct RefreshReport {
  std::size_t loss_updates_applied = 0;
  std::size_t score_updates_applied = 0;
  std::size_t unmatched = 0;  // update entries whose id is not in the points
};

struct RefreshResult {
  std::vector<QualityPoint> points;
  RefreshReport report;
};

/// Feedback merge: replaces caption_loss (and optionally clip_score) of
/// matching points, last update wins. Unmatched updates are counted, not
/// fatal; unmatched points pass through unchanged. Bounds are not
/// recomputed here; that is an explicit caller decision.
/// Throws IntegrityError on negative or non-finite update values.
RefreshResult refresh(std::span<const QualityPoint> points,
                      std::span<const LossRecord> new_losses,
                      std::span<const ScoreUpdate> new_scores = {});

}  // namespace dcscene

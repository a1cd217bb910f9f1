// SPDX-License-Identifier: Apache-2.0
#include "dcscene/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "dcscene/errors.hpp"

namespace dcscene {

StageMode stage_mode_from_string(std::string_view s) {
  if (s == "threshold") return StageMode::threshold;
  if (s == "fraction") return StageMode::fraction;
  throw UsageError("unknown stage mode: " + std::string(s) +
                   " (expected threshold or fraction)");
}

std::string_view to_string(StageMode mode) {
  return mode == StageMode::threshold ? "threshold" : "fraction";
}

StageThresholds stage_thresholds(const PercentileBounds& b, std::size_t k,
                                 double delta_s, double delta_l) {
  if (!(delta_s > 0.0) || !(delta_l > 0.0))
    throw UsageError("stage_thresholds: step sizes must be positive");
  return {b.s_min + double(k) * delta_s, b.l_min + double(k) * delta_l};
}

std::vector<QualityPoint> select_stage_threshold(std::span<const QualityPoint> points,
                                                 const PercentileBounds& b, std::size_t k,
                                                 double delta_s, double delta_l,
                                                 bool apply_upper_bounds) {
  const auto t = stage_thresholds(b, k, delta_s, delta_l);
  std::vector<QualityPoint> out;
  for (const auto& p : points) {
    if (p.clip_score < t.s_p || p.caption_loss < t.l_p) continue;
    if (apply_upper_bounds && (p.clip_score > b.s_max || p.caption_loss > b.l_max)) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<QualityPoint> rank_quality(std::span<const QualityPoint> points,
                                       const QualityRank& r) {
  if (!(r.w_s >= 0.0) || !(r.w_l >= 0.0) || std::abs(r.w_s + r.w_l - 1.0) > 1e-9)
    throw UsageError("rank weights must be non-negative and sum to 1");
  if (points.empty()) return {};

  double s_min = points[0].clip_score, s_max = s_min;
  double l_min = points[0].caption_loss, l_max = l_min;
  for (const auto& p : points) {
    s_min = std::min(s_min, p.clip_score);
    s_max = std::max(s_max, p.clip_score);
    l_min = std::min(l_min, p.caption_loss);
    l_max = std::max(l_max, p.caption_loss);
  }
  const double s_range = s_max - s_min;
  const double l_range = l_max - l_min;

  // A degenerate axis contributes a flat 0.5 so the other axis still orders.
  auto norm = [](double x, double lo, double range) {
    return range > 0.0 ? (x - lo) / range : 0.5;
  };

  struct Entry {
    double q;
    std::size_t idx;
  };
  std::vector<Entry> entries;
  entries.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double q = r.w_s * norm(points[i].clip_score, s_min, s_range) +
                     r.w_l * norm(points[i].caption_loss, l_min, l_range);
    entries.push_back({q, i});
  }
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (a.q != b.q) return a.q > b.q;
    return points[a.idx].sample_id < points[b.idx].sample_id;
  });

  std::vector<QualityPoint> out;
  out.reserve(points.size());
  for (const auto& e : entries) out.push_back(points[e.idx]);
  return out;
}

std::vector<QualityPoint> select_top_fraction(std::span<const QualityPoint> ranked,
                                              double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw UsageError("fraction must lie in (0, 1], got " + std::to_string(fraction));
  auto take = std::size_t(std::ceil(fraction * double(ranked.size())));
  take = std::min(take, ranked.size());
  return {ranked.begin(), ranked.begin() + std::ptrdiff_t(take)};
}

std::vector<QualityPoint> per_scene_topk(std::span<const QualityPoint> points,
                                         std::size_t k) {
  if (k == 0) throw UsageError("per_scene_topk: k must be at least 1");

  std::unordered_map<std::string_view, std::vector<std::size_t>> by_scene;
  for (std::size_t i = 0; i < points.size(); ++i)
    by_scene[points[i].scene_id].push_back(i);

  std::vector<char> keep(points.size(), 0);
  for (auto& [scene, idxs] : by_scene) {
    if (idxs.size() > k) {
      std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].clip_score != points[b].clip_score)
          return points[a].clip_score > points[b].clip_score;
        return points[a].sample_id < points[b].sample_id;
      });
      idxs.resize(k);
    }
    for (std::size_t i : idxs) keep[i] = 1;
  }

  std::vector<QualityPoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(points[i]);
  }
  return out;
}

Schedule build_schedule(int total_epochs, std::span<const StageSpec> specs) {
  if (total_epochs < 1) throw UsageError("build_schedule: total_epochs must be positive");
  if (specs.empty()) throw UsageError("build_schedule: at least one stage required");

  Schedule s;
  s.total_epochs = total_epochs;
  int begin = 1;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& spec = specs[k];
    if (spec.epoch_end < begin)
      throw UsageError("build_schedule: stage " + std::to_string(k) +
                       " epoch_end " + std::to_string(spec.epoch_end) +
                       " overlaps or inverts the previous stage");
    if (spec.mode == StageMode::fraction && (!(spec.fraction > 0.0) || spec.fraction > 1.0))
      throw UsageError("build_schedule: stage " + std::to_string(k) +
                       " fraction must lie in (0, 1]");
    StageConfig cfg;
    cfg.k = k;
    cfg.mode = spec.mode;
    cfg.fraction = spec.fraction;
    cfg.apply_upper_bounds = spec.apply_upper_bounds;
    cfg.epoch_begin = begin;
    cfg.epoch_end = spec.epoch_end;
    s.stages.push_back(cfg);
    begin = spec.epoch_end + 1;
  }
  if (s.stages.back().epoch_end != total_epochs)
    throw UsageError("build_schedule: last stage ends at epoch " +
                     std::to_string(s.stages.back().epoch_end) + ", expected " +
                     std::to_string(total_epochs));
  return s;
}

Schedule scanrefer_default_schedule() {
  const StageSpec specs[] = {
      {StageMode::fraction, 0.25, true, 360},
      {StageMode::fraction, 0.50, true, 720},
      {StageMode::fraction, 0.75, true, 1080},
  };
  return build_schedule(1080, specs);
}

const StageConfig& stage_for_epoch(const Schedule& schedule, int epoch) {
  if (epoch < 1 || epoch > schedule.total_epochs)
    throw UsageError("epoch " + std::to_string(epoch) + " outside schedule range [1, " +
                     std::to_string(schedule.total_epochs) + "]");
  for (const auto& stage : schedule.stages) {
    if (epoch >= stage.epoch_begin && epoch <= stage.epoch_end) return stage;
  }
  throw UsageError("epoch " + std::to_string(epoch) + " not covered by any stage");
}

RefreshResult refresh(std::span<const QualityPoint> points,
                      std::span<const LossRecord> new_losses,
                      std::span<const ScoreUpdate> new_scores) {
  RefreshResult result;
  result.points.assign(points.begin(), points.end());

  std::unordered_map<std::string_view, std::vector<std::size_t>> index;
  index.reserve(points.size());
  for (std::size_t i = 0; i < result.points.size(); ++i)
    index[result.points[i].sample_id].push_back(i);

  for (const auto& u : new_losses) {
    if (!std::isfinite(u.loss) || u.loss < 0.0)
      throw IntegrityError("refresh: loss update for " + u.sample_id +
                           " must be finite and non-negative");
    const auto it = index.find(u.sample_id);
    if (it == index.end()) {
      ++result.report.unmatched;
      continue;
    }
    for (std::size_t i : it->second) result.points[i].caption_loss = u.loss;
    ++result.report.loss_updates_applied;
  }
  for (const auto& u : new_scores) {
    if (!std::isfinite(u.clip_score))
      throw IntegrityError("refresh: score update for " + u.sample_id + " must be finite");
    const auto it = index.find(u.sample_id);
    if (it == index.end()) {
      ++result.report.unmatched;
      continue;
    }
    for (std::size_t i : it->second) result.points[i].clip_score = u.clip_score;
    ++result.report.score_updates_applied;
  }
  return result;
}

}  // namespace dcscene

// SPDX-License-Identifier: Apache-2.0
#include "dcscene/quality.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <json.hpp>

#include "dcscene/errors.hpp"

namespace dcscene {

namespace {

// Shortest round-trip decimal form, so emitted files are stable fixpoints.
std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double percentile_sorted(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = double(n - 1) * p / 100.0;
  const auto lo = std::size_t(h);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - double(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> checked_sorted(std::span<const double> values, const char* what) {
  if (values.empty()) throw UsageError(std::string(what) + ": empty input");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v) {
    if (std::isnan(x)) throw UsageError(std::string(what) + ": NaN in input");
  }
  std::sort(v.begin(), v.end());
  return v;
}

// ceil(range/delta) with a relative trim so that e.g. range 1.0 with
// delta 1/3 yields 3 blocks, not 4; never less than one block.
std::size_t block_count(double range, double delta) {
  if (!(range > 0.0)) return 1;
  const double q = range / delta;
  const double n = std::ceil(q - q * 1e-12);
  return n < 1.0 ? 1 : std::size_t(n);
}

bool in_region(const QualityPoint& p, const PercentileBounds& b) {
  return p.clip_score >= b.s_min && p.clip_score <= b.s_max &&
         p.caption_loss >= b.l_min && p.caption_loss <= b.l_max;
}

}  // namespace

double percentile(std::span<const double> values, double p) {
  if (!(p >= 0.0 && p <= 100.0))
    throw UsageError("percentile rank must lie in [0, 100], got " + std::to_string(p));
  const auto v = checked_sorted(values, "percentile");
  return percentile_sorted(v, p);
}

PercentileBounds compute_bounds(std::span<const QualityPoint> points,
                                double pct_lo, double pct_hi) {
  if (points.empty()) throw UsageError("compute_bounds: empty input");
  if (!(pct_lo >= 0.0 && pct_hi <= 100.0 && pct_lo < pct_hi))
    throw UsageError("compute_bounds: need 0 <= pct_lo < pct_hi <= 100");

  std::vector<double> scores, losses;
  scores.reserve(points.size());
  losses.reserve(points.size());
  for (const auto& p : points) {
    scores.push_back(p.clip_score);
    losses.push_back(p.caption_loss);
  }
  const auto s = checked_sorted(scores, "compute_bounds");
  const auto l = checked_sorted(losses, "compute_bounds");

  PercentileBounds b;
  b.pct_lo = pct_lo;
  b.pct_hi = pct_hi;
  b.s_min = percentile_sorted(s, pct_lo);
  b.s_max = percentile_sorted(s, pct_hi);
  b.l_min = percentile_sorted(l, pct_lo);
  b.l_max = percentile_sorted(l, pct_hi);
  return b;
}

std::vector<QualityPoint> filter_dis(std::span<const QualityPoint> points,
                                     const PercentileBounds& b) {
  std::vector<QualityPoint> out;
  for (const auto& p : points) {
    if (p.clip_score >= b.s_min && p.clip_score <= b.s_max) out.push_back(p);
  }
  return out;
}

std::vector<QualityPoint> filter_dil(std::span<const QualityPoint> points,
                                     const PercentileBounds& b) {
  std::vector<QualityPoint> out;
  for (const auto& p : points) {
    if (p.caption_loss >= b.l_min && p.caption_loss <= b.l_max) out.push_back(p);
  }
  return out;
}

std::vector<QualityPoint> filter_diq(std::span<const QualityPoint> points,
                                     const PercentileBounds& b) {
  std::vector<QualityPoint> out;
  for (const auto& p : points) {
    if (in_region(p, b)) out.push_back(p);
  }
  return out;
}

QualityGrid grid_partition(std::span<const QualityPoint> points, const PercentileBounds& b,
                           double delta_s, double delta_l) {
  if (!(delta_s > 0.0) || !(delta_l > 0.0))
    throw UsageError("grid_partition: step sizes must be positive");
  if (!(b.s_min <= b.s_max) || !(b.l_min <= b.l_max))
    throw UsageError("grid_partition: inverted bounds");

  QualityGrid grid;
  grid.bounds = b;
  grid.delta_s = delta_s;
  grid.delta_l = delta_l;
  grid.n_s = block_count(b.s_max - b.s_min, delta_s);
  grid.n_l = block_count(b.l_max - b.l_min, delta_l);
  if (grid.n_s > (1u << 20) || grid.n_l > (1u << 20) ||
      grid.n_s * grid.n_l > (1u << 24))
    throw UsageError("grid_partition: step sizes produce too many blocks");
  grid.blocks.resize(grid.n_s * grid.n_l);

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!in_region(p, b)) {
      ++grid.out_of_region;
      continue;
    }
    // Upper-edge points (and any floor dust) clamp into the last block.
    auto i_s = std::size_t((p.clip_score - b.s_min) / delta_s);
    auto i_l = std::size_t((p.caption_loss - b.l_min) / delta_l);
    if (i_s >= grid.n_s) i_s = grid.n_s - 1;
    if (i_l >= grid.n_l) i_l = grid.n_l - 1;
    grid.blocks[grid.block_index(i_s, i_l)].push_back(i);
  }
  return grid;
}

std::vector<BlockStats> block_stats(const QualityGrid& grid,
                                    std::span<const QualityPoint> points) {
  std::vector<BlockStats> stats;
  stats.reserve(grid.blocks.size());
  for (std::size_t i_s = 0; i_s < grid.n_s; ++i_s) {
    for (std::size_t i_l = 0; i_l < grid.n_l; ++i_l) {
      const auto& block = grid.block(i_s, i_l);
      BlockStats st;
      st.i_s = i_s;
      st.i_l = i_l;
      st.count = block.size();
      if (!block.empty()) {
        double score_sum = 0.0, loss_sum = 0.0;
        for (std::size_t idx : block) {
          if (idx >= points.size())
            throw UsageError("block_stats: grid does not match the given points");
          score_sum += points[idx].clip_score;
          loss_sum += points[idx].caption_loss;
        }
        st.mean_score = score_sum / double(block.size());
        st.mean_loss = loss_sum / double(block.size());
      }
      stats.push_back(st);
    }
  }
  return stats;
}

std::string block_stats_csv(std::span<const BlockStats> stats) {
  std::string out = "i_s,i_l,count,mean_score,mean_loss\n";
  for (const auto& st : stats) {
    out += std::to_string(st.i_s);
    out += ',';
    out += std::to_string(st.i_l);
    out += ',';
    out += std::to_string(st.count);
    out += ',';
    if (st.mean_score) out += format_double(*st.mean_score);
    out += ',';
    if (st.mean_loss) out += format_double(*st.mean_loss);
    out += '\n';
  }
  return out;
}

std::string bounds_to_json(const PercentileBounds& b) {
  nlohmann::ordered_json j;
  j["pct_lo"] = b.pct_lo;
  j["pct_hi"] = b.pct_hi;
  j["s_min"] = b.s_min;
  j["s_max"] = b.s_max;
  j["l_min"] = b.l_min;
  j["l_max"] = b.l_max;
  return j.dump(2) + "\n";
}

PercentileBounds bounds_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("bounds JSON parse error: ") + e.what());
  }
  PercentileBounds b;
  for (auto [key, dst] : {std::pair<const char*, double*>{"pct_lo", &b.pct_lo},
                          {"pct_hi", &b.pct_hi},
                          {"s_min", &b.s_min},
                          {"s_max", &b.s_max},
                          {"l_min", &b.l_min},
                          {"l_max", &b.l_max}}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
      throw FormatError(std::string("bounds JSON: missing or non-numeric \"") + key + "\"");
    *dst = it->get<double>();
  }
  if (!(b.s_min <= b.s_max) || !(b.l_min <= b.l_max))
    throw IntegrityError("bounds JSON: inverted bounds");
  return b;
}

}  // namespace dcscene

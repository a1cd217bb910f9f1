// SPDX-License-Identifier: Apache-2.0
#include "dcscene/scoring.hpp"

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "dcscene/errors.hpp"

namespace dcscene {

namespace {

// Four accumulators break the dependency chain; f32*f32 products are exact
// in double, so only the summation order varies between kernels.
double dot_f32(const float* a, const float* b, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += double(a[i]) * double(b[i]);
    a1 += double(a[i + 1]) * double(b[i + 1]);
    a2 += double(a[i + 2]) * double(b[i + 2]);
    a3 += double(a[i + 3]) * double(b[i + 3]);
  }
  for (; i < n; ++i) a0 += double(a[i]) * double(b[i]);
  return (a0 + a1) + (a2 + a3);
}

double sumsq_f32(const float* a, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += double(a[i]) * double(a[i]);
    a1 += double(a[i + 1]) * double(a[i + 1]);
    a2 += double(a[i + 2]) * double(a[i + 2]);
    a3 += double(a[i + 3]) * double(a[i + 3]);
  }
  for (; i < n; ++i) a0 += double(a[i]) * double(a[i]);
  return (a0 + a1) + (a2 + a3);
}

// Inverse L2 norm per row; 0.0 marks a degenerate (zero) row.
std::vector<double> inverse_norms(const EmbeddingTable& t) {
  std::vector<double> inv(t.count);
  for (std::size_t r = 0; r < t.count; ++r) {
    const double ss = sumsq_f32(t.rows.data() + r * t.dim, t.dim);
    inv[r] = ss > 0.0 ? 1.0 / std::sqrt(ss) : 0.0;
  }
  return inv;
}

template <typename T>
std::vector<double> normalize_impl(std::span<const T> v) {
  double ss = 0.0;
  for (T x : v) ss += double(x) * double(x);
  if (!std::isfinite(ss)) throw UsageError("l2_normalize: non-finite input");
  if (!(ss > 0.0)) throw UsageError("l2_normalize: zero vector");
  const double inv = 1.0 / std::sqrt(ss);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = double(v[i]) * inv;
  return out;
}

}  // namespace

ScorePolicy score_policy_from_string(std::string_view s) {
  if (s == "raw") return ScorePolicy::raw;
  if (s == "cosine") return ScorePolicy::cosine;
  throw UsageError("unknown scoring policy: " + std::string(s) +
                   " (expected raw or cosine)");
}

std::string_view to_string(ScorePolicy policy) {
  return policy == ScorePolicy::raw ? "raw" : "cosine";
}

std::vector<double> l2_normalize(std::span<const double> v) { return normalize_impl(v); }
std::vector<double> l2_normalize(std::span<const float> v) { return normalize_impl(v); }

double clip_score(std::span<const float> scene_vec, std::span<const float> text_vec,
                  ScorePolicy policy) {
  if (scene_vec.size() != text_vec.size())
    throw UsageError("clip_score: dimension mismatch: scene dim " +
                     std::to_string(scene_vec.size()) + " vs text dim " +
                     std::to_string(text_vec.size()));
  for (float x : scene_vec)
    if (!std::isfinite(x)) throw UsageError("clip_score: non-finite scene vector");
  for (float x : text_vec)
    if (!std::isfinite(x)) throw UsageError("clip_score: non-finite text vector");

  if (policy == ScorePolicy::cosine) {
    const auto s = l2_normalize(scene_vec);
    const auto t = l2_normalize(text_vec);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * t[i];
    return acc;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < scene_vec.size(); ++i)
    acc += double(scene_vec[i]) * double(text_vec[i]);
  return acc;
}

std::vector<QualityPoint> score_all(const EmbeddingTable& scene_emb,
                                    const EmbeddingTable& text_emb,
                                    std::span<const JoinedSample> samples,
                                    ScorePolicy policy) {
  if (scene_emb.dim != text_emb.dim)
    throw UsageError("score_all: dimension mismatch: scene dim " +
                     std::to_string(scene_emb.dim) + " vs text dim " +
                     std::to_string(text_emb.dim));
  for (const auto& s : samples) {
    if (s.scene_row >= scene_emb.count || s.text_row >= text_emb.count)
      throw UsageError("score_all: sample " + s.sample_id + " references rows outside the tables");
  }

  std::vector<double> inv_scene, inv_text;
  if (policy == ScorePolicy::cosine) {
    inv_scene = inverse_norms(scene_emb);
    inv_text = inverse_norms(text_emb);
  }

  const std::size_t dim = scene_emb.dim;
  std::vector<QualityPoint> out(samples.size());

  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto& s = samples[j];
      double score = dot_f32(scene_emb.rows.data() + s.scene_row * dim,
                             text_emb.rows.data() + s.text_row * dim, dim);
      if (policy == ScorePolicy::cosine) {
        const double is = inv_scene[s.scene_row];
        const double it = inv_text[s.text_row];
        if (is == 0.0 || it == 0.0)
          throw UsageError("score_all: zero vector for sample " + s.sample_id);
        score *= is * it;
      }
      out[j] = {s.sample_id, s.scene_id, score, s.caption_loss};
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t n = samples.size();
  std::size_t n_threads = hw > 1 && n >= (1u << 16) ? std::min<std::size_t>(hw, 16) : 1;
  if (n_threads <= 1) {
    score_range(0, n);
    return out;
  }

  // Per-sample outputs are independent, so splitting cannot change results.
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(n_threads);
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      try {
        score_range(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace dcscene

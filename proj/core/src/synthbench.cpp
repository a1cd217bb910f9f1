// SPDX-License-Identifier: Apache-2.0
#include "dcscene/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <unordered_set>

#include <json.hpp>

#include "dcscene/errors.hpp"

namespace dcscene {

namespace {

// Small deterministic RNG stack on top of SplitMix64, so a seed pins every
// byte of the generated population regardless of platform RNG libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_.next(); }
  std::uint64_t below(std::uint64_t n) { return gen_.next() % n; }

  double uniform01() {  // [0, 1)
    return double(gen_.next() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (double(gen_.next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  SplitMix64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> random_unit_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (;;) {
    double ss = 0.0;
    for (auto& x : v) {
      x = rng.gaussian();
      ss += x * x;
    }
    if (ss > 1e-18) {
      const double inv = 1.0 / std::sqrt(ss);
      for (auto& x : v) x *= inv;
      return v;
    }
  }
}

// Unit vector orthogonal to u (Gram-Schmidt on a fresh draw); empty when
// dim < 2 leaves no orthogonal direction.
std::vector<double> orthogonal_unit(Rng& rng, const std::vector<double>& u) {
  if (u.size() < 2) return {};
  for (;;) {
    auto r = random_unit_vector(rng, u.size());
    double proj = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) proj += r[i] * u[i];
    double ss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      r[i] -= proj * u[i];
      ss += r[i] * r[i];
    }
    if (ss > 1e-12) {
      const double inv = 1.0 / std::sqrt(ss);
      for (auto& x : r) x *= inv;
      return r;
    }
  }
}

constexpr std::size_t kVocab = 16;
constexpr double kChainProb = 0.9;

std::string scene_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "s%05zu", i);
  return buf;
}

std::string caption_name(const std::string& scene, std::size_t c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "-c%03zu", c);
  return scene + buf;
}

// Token sequences with controlled predictability under the chain LM:
// chain steps cost -log(kChainProb) each, off-chain steps cost
// -log((1-kChainProb)/(V-1)), so sequence class pins the loss band.
std::vector<std::uint32_t> chain_tokens(Rng& rng, std::size_t len) {
  std::vector<std::uint32_t> t(len);
  t[0] = std::uint32_t(rng.below(kVocab));
  for (std::size_t i = 1; i < len; ++i) t[i] = (t[i - 1] + 1) % kVocab;
  return t;
}

std::vector<std::uint32_t> offchain_tokens(Rng& rng, std::size_t len) {
  std::vector<std::uint32_t> t(len);
  t[0] = std::uint32_t(rng.below(kVocab));
  for (std::size_t i = 1; i < len; ++i) {
    const auto offset = 2 + std::uint32_t(rng.below(kVocab - 2));  // never the chain successor
    t[i] = (t[i - 1] + offset) % kVocab;
  }
  return t;
}

std::vector<std::uint32_t> mixed_tokens(Rng& rng, std::size_t len) {
  std::vector<std::uint32_t> t(len);
  t[0] = std::uint32_t(rng.below(kVocab));
  for (std::size_t i = 1; i < len; ++i) {
    if (rng.below(2) == 0) {
      t[i] = (t[i - 1] + 1) % kVocab;
    } else {
      const auto offset = 2 + std::uint32_t(rng.below(kVocab - 2));
      t[i] = (t[i - 1] + offset) % kVocab;
    }
  }
  return t;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Separation separation_from_string(std::string_view s) {
  if (s == "separable") return Separation::separable;
  if (s == "overlapping") return Separation::overlapping;
  throw UsageError("unknown separation mode: " + std::string(s) +
                   " (expected separable or overlapping)");
}

std::string_view to_string(Separation s) {
  return s == Separation::separable ? "separable" : "overlapping";
}

ToyLM::ToyLM(std::size_t vocab, std::vector<double> log_start,
             std::vector<double> log_bigram)
    : vocab_(vocab), log_start_(std::move(log_start)), log_bigram_(std::move(log_bigram)) {}

ToyLM ToyLM::uniform(std::size_t vocab) {
  if (vocab < 1) throw UsageError("ToyLM: vocabulary must be non-empty");
  const double lp = std::log(1.0 / double(vocab));
  return ToyLM(vocab, std::vector<double>(vocab, lp),
               std::vector<double>(vocab * vocab, lp));
}

ToyLM ToyLM::random(std::size_t vocab, std::uint64_t seed) {
  if (vocab < 1) throw UsageError("ToyLM: vocabulary must be non-empty");
  Rng rng(seed);
  auto draw_row = [&rng](std::span<double> row) {
    double sum = 0.0;
    for (auto& x : row) {
      x = rng.uniform01() + 0.1;  // smoothing keeps every probability positive
      sum += x;
    }
    for (auto& x : row) x = std::log(x / sum);
  };
  std::vector<double> start(vocab), bigram(vocab * vocab);
  draw_row(start);
  for (std::size_t r = 0; r < vocab; ++r)
    draw_row(std::span<double>(bigram.data() + r * vocab, vocab));
  return ToyLM(vocab, std::move(start), std::move(bigram));
}

ToyLM ToyLM::chain(std::size_t vocab, double follow_prob) {
  if (vocab < 2) throw UsageError("ToyLM::chain: vocabulary must have at least 2 tokens");
  if (!(follow_prob > 0.0) || !(follow_prob < 1.0))
    throw UsageError("ToyLM::chain: follow probability must lie in (0, 1)");
  const double rest = std::log((1.0 - follow_prob) / double(vocab - 1));
  const double follow = std::log(follow_prob);
  std::vector<double> start(vocab, std::log(1.0 / double(vocab)));
  std::vector<double> bigram(vocab * vocab, rest);
  for (std::size_t t = 0; t < vocab; ++t) bigram[t * vocab + (t + 1) % vocab] = follow;
  return ToyLM(vocab, std::move(start), std::move(bigram));
}

double ToyLM::log_start(std::uint32_t token) const {
  if (token >= vocab_) throw UsageError("ToyLM: token " + std::to_string(token) +
                                        " outside vocabulary of " + std::to_string(vocab_));
  return log_start_[token];
}

double ToyLM::log_bigram(std::uint32_t prev, std::uint32_t next) const {
  if (prev >= vocab_ || next >= vocab_)
    throw UsageError("ToyLM: token pair (" + std::to_string(prev) + ", " +
                     std::to_string(next) + ") outside vocabulary of " +
                     std::to_string(vocab_));
  return log_bigram_[std::size_t(prev) * vocab_ + next];
}

double toy_caption_loss(std::span<const std::uint32_t> token_ids, const ToyLM& lm) {
  if (token_ids.empty()) throw UsageError("toy_caption_loss: empty caption");
  double log_prob = lm.log_start(token_ids[0]);
  for (std::size_t t = 1; t < token_ids.size(); ++t)
    log_prob += lm.log_bigram(token_ids[t - 1], token_ids[t]);
  return -log_prob;
}

SynthDataset gen_synth_pairs(const SynthConfig& cfg) {
  if (cfg.n_scenes < 1 || cfg.captions_per_scene < 1)
    throw UsageError("gen_synth_pairs: need at least one scene and one caption per scene");
  if (cfg.dim < 1) throw UsageError("gen_synth_pairs: dim must be positive");
  if (!(cfg.corrupt_fraction >= 0.0) || cfg.corrupt_fraction >= 1.0)
    throw UsageError("gen_synth_pairs: corrupt_fraction must lie in [0, 1)");
  if (cfg.separation == Separation::separable && cfg.dim < 2)
    throw UsageError("gen_synth_pairs: separable mode needs dim >= 2 "
                     "(no orthogonal direction in dim 1)");

  Rng rng(cfg.seed);
  const std::size_t total = cfg.n_scenes * cfg.captions_per_scene;
  const bool separable = cfg.separation == Separation::separable;

  // Plant an exact corrupted count on a seeded random subset.
  const auto n_corrupt = std::size_t(cfg.corrupt_fraction * double(total) + 0.5);
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  for (std::size_t i = total; i-- > 1;) {
    const std::size_t j = std::size_t(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> corrupted(total, false);
  for (std::size_t i = 0; i < n_corrupt; ++i) corrupted[order[i]] = true;

  SynthDataset ds{
      .scene_emb = {},
      .text_emb = {},
      .captions = {},
      .losses = {},
      .corrupted = corrupted,
      .lm = ToyLM::chain(kVocab, kChainProb),
  };

  ds.scene_emb.count = cfg.n_scenes;
  ds.scene_emb.dim = cfg.dim;
  ds.scene_emb.normalized = true;
  ds.scene_emb.rows.reserve(cfg.n_scenes * cfg.dim);
  std::vector<std::vector<double>> scene_vecs;
  scene_vecs.reserve(cfg.n_scenes);
  for (std::size_t i = 0; i < cfg.n_scenes; ++i) {
    ds.scene_emb.ids.push_back(scene_name(i));
    scene_vecs.push_back(random_unit_vector(rng, cfg.dim));
    for (double x : scene_vecs.back()) ds.scene_emb.rows.push_back(float(x));
  }

  ds.text_emb.count = total;
  ds.text_emb.dim = cfg.dim;
  ds.text_emb.normalized = true;
  ds.text_emb.rows.reserve(total * cfg.dim);
  ds.captions.reserve(total);
  ds.losses.reserve(total);

  std::size_t global = 0;
  for (std::size_t i = 0; i < cfg.n_scenes; ++i) {
    const auto& u = scene_vecs[i];
    for (std::size_t c = 0; c < cfg.captions_per_scene; ++c, ++global) {
      const bool bad = corrupted[global];
      const auto id = caption_name(ds.scene_emb.ids[i], c);

      // Target cosine against the scene vector. Separable mode keeps the two
      // classes in disjoint bands so corrupted never outscores clean.
      const double draw = rng.uniform01();
      double cosine;
      if (separable) {
        cosine = bad ? 0.05 + 0.10 * draw : 0.85 + 0.10 * draw;
      } else {
        cosine = bad ? 0.05 + 0.55 * draw : 0.30 + 0.60 * draw;
      }
      const auto v = orthogonal_unit(rng, u);
      const double side = std::sqrt(std::max(0.0, 1.0 - cosine * cosine));
      for (std::size_t d = 0; d < cfg.dim; ++d) {
        const double component = cosine * u[d] + (v.empty() ? 0.0 : side * v[d]);
        ds.text_emb.rows.push_back(float(component));
      }
      ds.text_emb.ids.push_back(id);

      // Separable mode also separates losses: corrupted captions follow the
      // chain (cheap to predict), clean ones never do.
      std::vector<std::uint32_t> tokens;
      if (separable) {
        tokens = bad ? chain_tokens(rng, 3 + rng.below(4))
                     : offchain_tokens(rng, 8 + rng.below(5));
      } else {
        tokens = mixed_tokens(rng, 5 + rng.below(6));
      }
      const double loss = toy_caption_loss(tokens, ds.lm);

      CaptionRecord rec;
      rec.sample_id = id;
      rec.scene_id = ds.scene_emb.ids[i];
      rec.token_ids = std::move(tokens);
      ds.captions.push_back(std::move(rec));
      ds.losses.push_back({id, loss});
    }
  }
  return ds;
}

void write_synth_dataset(const SynthDataset& ds, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string() + ": " + ec.message());
  write_embedding_table(ds.scene_emb, out_dir / "scene.dcse");
  write_embedding_table(ds.text_emb, out_dir / "text.dcse");
  write_caption_index(ds.captions, out_dir / "captions.jsonl");
  write_loss_log(ds.losses, out_dir / "losses.jsonl");
}

ToyPipelineResult run_toy_pipeline(const SynthConfig& cfg, const Schedule& schedule,
                                   const std::filesystem::path& out_dir,
                                   const ToyPipelineOptions& options) {
  if (schedule.stages.empty()) throw UsageError("run_toy_pipeline: empty schedule");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string() + ": " + ec.message());

  const SynthDataset ds = gen_synth_pairs(cfg);
  std::unordered_set<std::string_view> corrupted_ids;
  for (std::size_t i = 0; i < ds.captions.size(); ++i) {
    if (ds.corrupted[i]) corrupted_ids.insert(ds.captions[i].sample_id);
  }
  const auto count_corrupted = [&](std::span<const SampleId> ids) {
    std::size_t n = 0;
    for (const auto& id : ids) n += corrupted_ids.contains(id);
    return n;
  };

  ToyPipelineResult result;
  const auto join = join_dataset(ds.captions, ds.scene_emb, ds.text_emb, ds.losses);
  result.join = join.report;

  const auto points = score_all(ds.scene_emb, ds.text_emb, join.samples, options.policy);
  result.bounds = compute_bounds(points, options.pct_lo, options.pct_hi);
  const auto diq = filter_diq(points, result.bounds);
  result.diq_size = diq.size();
  {
    std::vector<SampleId> diq_ids;
    diq_ids.reserve(diq.size());
    for (const auto& p : diq) diq_ids.push_back(p.sample_id);
    result.diq_corrupted = count_corrupted(diq_ids);
  }

  const auto pool = options.per_scene_k ? per_scene_topk(diq, *options.per_scene_k) : diq;
  result.pool_after_topk = pool.size();
  const auto ranked = rank_quality(pool, options.rank);

  const double delta_s =
      (result.bounds.s_max - result.bounds.s_min) / double(options.grid_blocks_s);
  const double delta_l =
      (result.bounds.l_max - result.bounds.l_min) / double(options.grid_blocks_l);
  const std::uint64_t seed = options.manifest_seed.value_or(cfg.seed);

  for (const auto& stage : schedule.stages) {
    std::vector<QualityPoint> selected;
    if (stage.mode == StageMode::fraction) {
      selected = select_top_fraction(ranked, stage.fraction);
    } else {
      selected = select_stage_threshold(pool, result.bounds, stage.k, delta_s, delta_l,
                                        stage.apply_upper_bounds);
    }
    const auto manifest_path = out_dir / ("stage" + std::to_string(stage.k) + ".manifest");
    StageOutcome outcome;
    outcome.config = stage;
    outcome.pool_ids.reserve(selected.size());
    for (const auto& p : selected) outcome.pool_ids.push_back(p.sample_id);
    outcome.corrupted_in_pool = count_corrupted(outcome.pool_ids);
    outcome.manifest =
        emit_manifest(selected, int(stage.k), to_string(stage.mode), seed, manifest_path);
    result.stages.push_back(std::move(outcome));
  }

  const auto grid = grid_partition(points, result.bounds, delta_s, delta_l);
  result.blocks = block_stats(grid, points);

  nlohmann::ordered_json report;
  report["synth"] = {
      {"n_scenes", cfg.n_scenes},
      {"captions_per_scene", cfg.captions_per_scene},
      {"dim", cfg.dim},
      {"corrupt_fraction", cfg.corrupt_fraction},
      {"separation", std::string(to_string(cfg.separation))},
      {"seed", cfg.seed},
  };
  report["join"] = {
      {"joined", result.join.joined},
      {"missing_scene_embedding", result.join.missing_scene_embedding},
      {"missing_text_embedding", result.join.missing_text_embedding},
      {"missing_loss", result.join.missing_loss},
  };
  report["scoring_policy"] = std::string(to_string(options.policy));
  report["bounds"] = {
      {"pct_lo", result.bounds.pct_lo}, {"pct_hi", result.bounds.pct_hi},
      {"s_min", result.bounds.s_min},   {"s_max", result.bounds.s_max},
      {"l_min", result.bounds.l_min},   {"l_max", result.bounds.l_max},
  };
  report["diq"] = {{"size", result.diq_size}, {"corrupted", result.diq_corrupted}};
  if (options.per_scene_k) report["per_scene_k"] = *options.per_scene_k;
  report["pool_after_topk"] = result.pool_after_topk;
  report["rank"] = {{"w_s", options.rank.w_s}, {"w_l", options.rank.w_l}};
  report["stages"] = nlohmann::ordered_json::array();
  for (const auto& st : result.stages) {
    nlohmann::ordered_json js = {
        {"k", st.config.k},
        {"mode", std::string(to_string(st.config.mode))},
        {"epoch_begin", st.config.epoch_begin},
        {"epoch_end", st.config.epoch_end},
        {"pool_size", st.pool_ids.size()},
        {"corrupted", st.corrupted_in_pool},
        {"manifest", "stage" + std::to_string(st.config.k) + ".manifest"},
        {"seed", st.manifest.seed},
        {"digest", hex16(st.manifest.digest)},
    };
    if (st.config.mode == StageMode::fraction) js["fraction"] = st.config.fraction;
    report["stages"].push_back(std::move(js));
  }
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : result.blocks) {
    nlohmann::ordered_json jb = {{"i_s", b.i_s}, {"i_l", b.i_l}, {"count", b.count}};
    if (b.mean_score) jb["mean_score"] = *b.mean_score;
    if (b.mean_loss) jb["mean_loss"] = *b.mean_loss;
    blocks.push_back(std::move(jb));
  }
  report["grid"] = {
      {"n_s", grid.n_s},
      {"n_l", grid.n_l},
      {"delta_s", grid.delta_s},
      {"delta_l", grid.delta_l},
      {"out_of_region", grid.out_of_region},
      {"blocks", std::move(blocks)},
  };
  result.report_json = report.dump(2) + "\n";

  const auto report_path = out_dir / "report.json";
  std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + report_path.string());
  out << result.report_json;
  out.flush();
  if (!out) throw IoError("write failed: " + report_path.string());
  return result;
}

}  // namespace dcscene

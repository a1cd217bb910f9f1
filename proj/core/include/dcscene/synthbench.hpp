// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcscene/curriculum.hpp"
#include "dcscene/dataio.hpp"
#include "dcscene/manifest.hpp"
#include "dcscene/quality.hpp"
#include "dcscene/scoring.hpp"
#include "dcscene/types.hpp"

namespace dcscene {

/// separable: corrupted pairs score strictly below every clean pair (and get
/// strictly lower toy losses), turning filtering claims into exact checks.
/// overlapping: score and loss populations overlap; no purity guarantee.
enum class Separation { separable, overlapping };

Separation separation_from_string(std::string_view s);
std::string_view to_string(Separation s);

struct SynthConfig {
  std::size_t n_scenes = 100;
  std::size_t captions_per_scene = 10;
  std::size_t dim = 64;
  double corrupt_fraction = 0.0;  // in [0, 1)
  Separation separation = Separation::separable;
  std::uint64_t seed = 0;
};

/// Bigram language model over a small vocabulary with smoothed, strictly
/// positive probabilities. Each bigram row and the start distribution sum
/// to 1 within 1e-9.
class ToyLM {
public:
  static ToyLM uniform(std::size_t vocab);
  static ToyLM random(std::size_t vocab, std::uint64_t seed);
  /// Markov chain favouring token t -> (t+1) mod V with probability
  /// follow_prob; all other transitions share the remainder equally.
  static ToyLM chain(std::size_t vocab, double follow_prob);

  std::size_t vocab_size() const { return vocab_; }
  double log_start(std::uint32_t token) const;
  double log_bigram(std::uint32_t prev, std::uint32_t next) const;

private:
  ToyLM(std::size_t vocab, std::vector<double> log_start,
        std::vector<double> log_bigram);
  std::size_t vocab_ = 0;
  std::vector<double> log_start_;   // V entries
  std::vector<double> log_bigram_;  // V*V entries, row-major by prev token
};

/// Caption loss in nats: -log P(y_1) - sum_t log P(y_t | y_{t-1}), with the
/// start distribution covering the first token. Throws UsageError on an
/// empty caption or an out-of-vocabulary token.
double toy_caption_loss(std::span<const std::uint32_t> token_ids, const ToyLM& lm);

struct SynthDataset {
  EmbeddingTable scene_emb;
  EmbeddingTable text_emb;
  std::vector<CaptionRecord> captions;
  std::vector<LossRecord> losses;       // toy bigram losses, caption order
  std::vector<bool> corrupted;          // parallel to captions
  ToyLM lm;
};

/// Deterministically generates a scene/caption population with planted
/// corruption. Clean captions embed close to their scene (cosine >= 0.8 in
/// separable mode); corrupted captions lean orthogonal (cosine <= 0.2).
/// Everything derives from cfg.seed. Throws UsageError when separable
/// construction is impossible (dim < 2).
SynthDataset gen_synth_pairs(const SynthConfig& cfg);

struct ToyPipelineOptions {
  ScorePolicy policy = ScorePolicy::cosine;
  double pct_lo = 5.0;
  double pct_hi = 95.0;
  QualityRank rank;
  std::optional<std::size_t> per_scene_k;
  std::optional<std::uint64_t> manifest_seed;  // defaults to cfg.seed
  std::size_t grid_blocks_s = 3;
  std::size_t grid_blocks_l = 3;
};

struct StageOutcome {
  StageConfig config;
  std::vector<SampleId> pool_ids;  // selection order, before the shuffle
  std::size_t corrupted_in_pool = 0;
  Manifest manifest;
};

struct ToyPipelineResult {
  JoinReport join;
  PercentileBounds bounds;
  std::size_t diq_size = 0;
  std::size_t diq_corrupted = 0;
  std::size_t pool_after_topk = 0;
  std::vector<StageOutcome> stages;
  std::vector<BlockStats> blocks;
  std::string report_json;  // canonical serialized report, deterministic bytes
};

/// Runs the full loop at desk scale: score, bound, filter, per-scene top-k,
/// rank, stage selection, manifest emission, block statistics. Writes one
/// manifest per stage plus report.json into out_dir. Identical inputs
/// produce byte-identical outputs.
ToyPipelineResult run_toy_pipeline(const SynthConfig& cfg, const Schedule& schedule,
                                   const std::filesystem::path& out_dir,
                                   const ToyPipelineOptions& options = {});

/// Writes the generated population itself (DCSE tables, caption index,
/// loss log) into out_dir, for feeding the file-based pipeline.
void write_synth_dataset(const SynthDataset& ds, const std::filesystem::path& out_dir);

}  // namespace dcscene

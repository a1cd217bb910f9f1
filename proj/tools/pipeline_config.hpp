// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcscene/curriculum.hpp"
#include "dcscene/scoring.hpp"
#include "dcscene/synthbench.hpp"

namespace dcscene::cli {

/// Everything a pipeline run needs, merged from (in rising precedence)
/// built-in defaults, a JSON config file, and command-line overrides.
struct PipelineConfig {
  // input/output paths
  std::string scene_embeddings;
  std::string text_embeddings;
  std::string captions;
  std::string losses;
  std::string output_dir = ".";

  ScorePolicy policy = ScorePolicy::cosine;
  double pct_lo = 5.0;
  double pct_hi = 95.0;

  // grid steps; unset deltas derive from the bounds and block counts
  std::optional<double> delta_s;
  std::optional<double> delta_l;
  std::size_t blocks_s = 3;
  std::size_t blocks_l = 3;

  QualityRank rank;
  std::optional<std::size_t> per_scene_k;
  std::uint64_t seed = 0;
  bool recompute_bounds = false;

  // curriculum
  int total_epochs = 1080;
  std::vector<StageSpec> stage_specs;  // defaults to the scanrefer-default preset

  SynthConfig synth;
};

/// `name` is either the literal "scanrefer-default" (the built-in preset)
/// or a path to a JSON config file.
PipelineConfig load_pipeline_config(const std::string& name);

PipelineConfig default_pipeline_config();

Schedule schedule_from(const PipelineConfig& cfg);

}  // namespace dcscene::cli

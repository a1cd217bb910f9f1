// SPDX-License-Identifier: Apache-2.0
#include "pipeline_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcscene/errors.hpp"

namespace dcscene::cli {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw UsageError("config: unknown key \"" + key + "\" in " + where);
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw UsageError(std::string("config: \"") + key + "\" must be a number");
  return it->get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw UsageError(std::string("config: \"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::vector<StageSpec> default_stage_specs() {
  return {
      {StageMode::fraction, 0.25, true, 360},
      {StageMode::fraction, 0.50, true, 720},
      {StageMode::fraction, 0.75, true, 1080},
  };
}

}  // namespace

PipelineConfig default_pipeline_config() {
  PipelineConfig cfg;
  cfg.stage_specs = default_stage_specs();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& name) {
  PipelineConfig cfg = default_pipeline_config();
  if (name.empty() || name == "scanrefer-default") return cfg;

  std::ifstream in(name);
  if (!in) throw IoError("cannot open config: " + name);
  std::stringstream buf;
  buf << in.rdbuf();

  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw FormatError(name + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError(name + ": config must be a JSON object");
  reject_unknown_keys(j,
                      {"paths", "scoring", "percentiles", "grid", "rank", "per_scene_k",
                       "seed", "recompute_bounds", "curriculum", "synth"},
                      "config root");

  if (auto it = j.find("paths"); it != j.end()) {
    reject_unknown_keys(*it,
                        {"scene_embeddings", "text_embeddings", "captions", "losses",
                         "output_dir"},
                        "\"paths\"");
    cfg.scene_embeddings = get_string(*it, "scene_embeddings", cfg.scene_embeddings);
    cfg.text_embeddings = get_string(*it, "text_embeddings", cfg.text_embeddings);
    cfg.captions = get_string(*it, "captions", cfg.captions);
    cfg.losses = get_string(*it, "losses", cfg.losses);
    cfg.output_dir = get_string(*it, "output_dir", cfg.output_dir);
  }
  if (auto it = j.find("scoring"); it != j.end()) {
    reject_unknown_keys(*it, {"policy"}, "\"scoring\"");
    cfg.policy = score_policy_from_string(get_string(*it, "policy", "cosine"));
  }
  if (auto it = j.find("percentiles"); it != j.end()) {
    reject_unknown_keys(*it, {"lo", "hi"}, "\"percentiles\"");
    cfg.pct_lo = get_number(*it, "lo", cfg.pct_lo);
    cfg.pct_hi = get_number(*it, "hi", cfg.pct_hi);
  }
  if (auto it = j.find("grid"); it != j.end()) {
    reject_unknown_keys(*it, {"delta_s", "delta_l", "blocks_s", "blocks_l"}, "\"grid\"");
    if (it->contains("delta_s") && !(*it)["delta_s"].is_null())
      cfg.delta_s = get_number(*it, "delta_s", 0.0);
    if (it->contains("delta_l") && !(*it)["delta_l"].is_null())
      cfg.delta_l = get_number(*it, "delta_l", 0.0);
    cfg.blocks_s = std::size_t(get_number(*it, "blocks_s", double(cfg.blocks_s)));
    cfg.blocks_l = std::size_t(get_number(*it, "blocks_l", double(cfg.blocks_l)));
  }
  if (auto it = j.find("rank"); it != j.end()) {
    reject_unknown_keys(*it, {"w_s", "w_l"}, "\"rank\"");
    cfg.rank.w_s = get_number(*it, "w_s", cfg.rank.w_s);
    cfg.rank.w_l = get_number(*it, "w_l", cfg.rank.w_l);
  }
  if (auto it = j.find("per_scene_k"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned() || it->get<std::uint64_t>() < 1)
      throw UsageError("config: \"per_scene_k\" must be a positive integer");
    cfg.per_scene_k = std::size_t(it->get<std::uint64_t>());
  }
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned())
      throw UsageError("config: \"seed\" must be an unsigned integer");
    cfg.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("recompute_bounds"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw UsageError("config: \"recompute_bounds\" must be a boolean");
    cfg.recompute_bounds = it->get<bool>();
  }
  if (auto it = j.find("curriculum"); it != j.end()) {
    reject_unknown_keys(*it, {"mode", "total_epochs", "apply_upper_bounds", "stages"},
                        "\"curriculum\"");
    const auto mode = stage_mode_from_string(get_string(*it, "mode", "fraction"));
    const bool upper = [&] {
      auto u = it->find("apply_upper_bounds");
      if (u == it->end() || u->is_null()) return true;
      if (!u->is_boolean())
        throw UsageError("config: \"apply_upper_bounds\" must be a boolean");
      return u->get<bool>();
    }();
    cfg.total_epochs = int(get_number(*it, "total_epochs", double(cfg.total_epochs)));
    if (auto s = it->find("stages"); s != it->end() && !s->is_null()) {
      if (!s->is_array()) throw UsageError("config: \"stages\" must be an array");
      cfg.stage_specs.clear();
      for (const auto& stage : *s) {
        reject_unknown_keys(stage, {"fraction", "epoch_end"}, "stage entry");
        StageSpec spec;
        spec.mode = mode;
        spec.apply_upper_bounds = upper;
        spec.fraction = get_number(stage, "fraction", 1.0);
        spec.epoch_end = int(get_number(stage, "epoch_end", 0.0));
        cfg.stage_specs.push_back(spec);
      }
    } else {
      for (auto& spec : cfg.stage_specs) {
        spec.mode = mode;
        spec.apply_upper_bounds = upper;
      }
    }
  }
  if (auto it = j.find("synth"); it != j.end()) {
    reject_unknown_keys(*it,
                        {"n_scenes", "captions_per_scene", "dim", "corrupt_fraction",
                         "separation", "seed"},
                        "\"synth\"");
    cfg.synth.n_scenes = std::size_t(get_number(*it, "n_scenes", double(cfg.synth.n_scenes)));
    cfg.synth.captions_per_scene =
        std::size_t(get_number(*it, "captions_per_scene", double(cfg.synth.captions_per_scene)));
    cfg.synth.dim = std::size_t(get_number(*it, "dim", double(cfg.synth.dim)));
    cfg.synth.corrupt_fraction =
        get_number(*it, "corrupt_fraction", cfg.synth.corrupt_fraction);
    cfg.synth.separation =
        separation_from_string(get_string(*it, "separation", "separable"));
    cfg.synth.seed = std::uint64_t(get_number(*it, "seed", double(cfg.synth.seed)));
  }
  return cfg;
}

Schedule schedule_from(const PipelineConfig& cfg) {
  return build_schedule(cfg.total_epochs, cfg.stage_specs);
}

}  // namespace dcscene::cli

// SPDX-License-Identifier: Apache-2.0
//
// dc-scene: batch CLI over the curation engine. One subcommand per pipeline
// step so the feedback path can re-enter mid-pipeline between stages.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcscene/curriculum.hpp"
#include "dcscene/dataio.hpp"
#include "dcscene/errors.hpp"
#include "dcscene/manifest.hpp"
#include "dcscene/quality.hpp"
#include "dcscene/scoring.hpp"
#include "dcscene/synthbench.hpp"
#include "pipeline_config.hpp"

namespace fs = std::filesystem;
using namespace dcscene;
using cli::PipelineConfig;

namespace {

// Exit codes, also documented in the README:
//   0 success, 1 other failure, 2 usage, 3 missing/unreadable input or
//   unwritable output, 4 format error, 5 integrity error.
enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kIntegrity = 5,
};

void require_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("no ") + what + " path given");
  if (!fs::exists(path))
    throw IoError(std::string("missing ") + what + ": " + path);
}

void ensure_parent_dir(const fs::path& p) {
  const auto parent = p.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PercentileBounds load_or_compute_bounds(const std::string& bounds_path,
                                        std::span<const QualityPoint> points,
                                        const PipelineConfig& cfg) {
  if (!bounds_path.empty()) {
    require_input(bounds_path, "bounds file");
    return bounds_from_json(read_text(bounds_path));
  }
  return compute_bounds(points, cfg.pct_lo, cfg.pct_hi);
}

double grid_delta(std::optional<double> configured, double lo, double hi,
                  std::size_t blocks) {
  if (configured) return *configured;
  if (blocks == 0) throw UsageError("block count must be positive");
  return (hi - lo) / double(blocks);
}

// Update lines: {"sample_id": ..., "loss": ... and/or "clip_score": ...}.
struct Updates {
  std::vector<LossRecord> losses;
  std::vector<ScoreUpdate> scores;
};

Updates read_updates(const fs::path& path) {
  Updates u;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    const auto fail = [&](const std::string& what) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": " + what);
    };
    if (!obj.is_object()) fail("expected a JSON object");
    auto sid = obj.find("sample_id");
    if (sid == obj.end() || !sid->is_string()) fail("missing or non-string \"sample_id\"");
    const auto id = sid->get<std::string>();
    bool any = false;
    if (auto it = obj.find("loss"); it != obj.end() && !it->is_null()) {
      if (!it->is_number()) fail("\"loss\" must be a number");
      u.losses.push_back({id, it->get<double>()});
      any = true;
    }
    if (auto it = obj.find("clip_score"); it != obj.end() && !it->is_null()) {
      if (!it->is_number()) fail("\"clip_score\" must be a number");
      u.scores.push_back({id, it->get<double>()});
      any = true;
    }
    if (!any) fail("update needs \"loss\" and/or \"clip_score\"");
  }
  return u;
}

// Shared stage-pool construction: quality region, optional per-scene cap,
// then either ranked top-fraction or threshold selection.
std::vector<QualityPoint> build_stage_pool(std::span<const QualityPoint> points,
                                           const PercentileBounds& bounds,
                                           const StageConfig& stage,
                                           const PipelineConfig& cfg) {
  if (stage.mode == StageMode::fraction) {
    auto pool = filter_diq(points, bounds);
    if (cfg.per_scene_k) pool = per_scene_topk(pool, *cfg.per_scene_k);
    const auto ranked = rank_quality(pool, cfg.rank);
    return select_top_fraction(ranked, stage.fraction);
  }
  const double ds = grid_delta(cfg.delta_s, bounds.s_min, bounds.s_max, cfg.blocks_s);
  const double dl = grid_delta(cfg.delta_l, bounds.l_min, bounds.l_max, cfg.blocks_l);
  std::vector<QualityPoint> base(points.begin(), points.end());
  if (cfg.per_scene_k) base = per_scene_topk(base, *cfg.per_scene_k);
  return select_stage_threshold(base, bounds, stage.k, ds, dl, stage.apply_upper_bounds);
}

struct CommonArgs {
  std::string config;
  PipelineConfig cfg;

  void load() { cfg = cli::load_pipeline_config(config); }
};

int cmd_score(CommonArgs& common, const std::string& scene_path,
              const std::string& text_path, const std::string& captions_path,
              const std::string& losses_path, const std::string& out,
              const std::string& policy) {
  auto& cfg = common.cfg;
  const auto scene = scene_path.empty() ? cfg.scene_embeddings : scene_path;
  const auto text = text_path.empty() ? cfg.text_embeddings : text_path;
  const auto caps = captions_path.empty() ? cfg.captions : captions_path;
  const auto losses = losses_path.empty() ? cfg.losses : losses_path;
  if (!policy.empty()) cfg.policy = score_policy_from_string(policy);

  require_input(scene, "scene embeddings");
  require_input(text, "text embeddings");
  require_input(caps, "caption index");
  require_input(losses, "loss log");

  const auto scene_emb = read_embedding_table(scene);
  const auto text_emb = read_embedding_table(text);
  const auto captions = read_caption_index(caps);
  const auto loss_log = read_loss_log(losses);

  const auto join = join_dataset(captions, scene_emb, text_emb, loss_log);
  const auto points = score_all(scene_emb, text_emb, join.samples, cfg.policy);

  const fs::path out_path = out.empty() ? fs::path(cfg.output_dir) / "points.jsonl" : fs::path(out);
  ensure_parent_dir(out_path);
  write_quality_points(points, out_path);

  std::cerr << "scored " << points.size() << " pairs (" << to_string(cfg.policy)
            << "); dropped " << join.report.dropped() << " (scene "
            << join.report.missing_scene_embedding << ", text "
            << join.report.missing_text_embedding << ", loss "
            << join.report.missing_loss << ") -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_bounds(CommonArgs& common, const std::string& points_path, const std::string& out,
               std::optional<double> pct_lo, std::optional<double> pct_hi) {
  auto& cfg = common.cfg;
  if (pct_lo) cfg.pct_lo = *pct_lo;
  if (pct_hi) cfg.pct_hi = *pct_hi;
  require_input(points_path, "points file");
  const auto points = read_quality_points(points_path);
  const auto b = compute_bounds(points, cfg.pct_lo, cfg.pct_hi);
  const fs::path out_path = out.empty() ? fs::path(cfg.output_dir) / "bounds.json" : fs::path(out);
  write_text(out_path, bounds_to_json(b));
  std::cerr << "bounds over " << points.size() << " points -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_filter(CommonArgs& common, const std::string& points_path,
               const std::string& bounds_path, const std::string& set_name,
               const std::string& out, std::optional<double> pct_lo,
               std::optional<double> pct_hi) {
  auto& cfg = common.cfg;
  if (pct_lo) cfg.pct_lo = *pct_lo;
  if (pct_hi) cfg.pct_hi = *pct_hi;
  require_input(points_path, "points file");
  const auto points = read_quality_points(points_path);
  const auto b = load_or_compute_bounds(bounds_path, points, cfg);

  std::vector<QualityPoint> kept;
  if (set_name == "dis") {
    kept = filter_dis(points, b);
  } else if (set_name == "dil") {
    kept = filter_dil(points, b);
  } else if (set_name == "diq") {
    kept = filter_diq(points, b);
  } else {
    throw UsageError("unknown filter set: " + set_name + " (expected dis, dil or diq)");
  }

  const fs::path out_path =
      out.empty() ? fs::path(cfg.output_dir) / "filtered.jsonl" : fs::path(out);
  ensure_parent_dir(out_path);
  write_quality_points(kept, out_path);
  std::cerr << "kept " << kept.size() << " of " << points.size() << " points ("
            << set_name << ") -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_grid_report(CommonArgs& common, const std::string& points_path,
                    const std::string& bounds_path, const std::string& out,
                    std::optional<double> delta_s, std::optional<double> delta_l,
                    std::optional<std::size_t> blocks_s,
                    std::optional<std::size_t> blocks_l) {
  auto& cfg = common.cfg;
  if (delta_s) cfg.delta_s = delta_s;
  if (delta_l) cfg.delta_l = delta_l;
  if (blocks_s) cfg.blocks_s = *blocks_s;
  if (blocks_l) cfg.blocks_l = *blocks_l;

  require_input(points_path, "points file");
  const auto points = read_quality_points(points_path);
  const auto b = load_or_compute_bounds(bounds_path, points, cfg);
  const double ds = grid_delta(cfg.delta_s, b.s_min, b.s_max, cfg.blocks_s);
  const double dl = grid_delta(cfg.delta_l, b.l_min, b.l_max, cfg.blocks_l);

  const auto grid = grid_partition(points, b, ds, dl);
  const auto stats = block_stats(grid, points);
  const fs::path out_path = out.empty() ? fs::path(cfg.output_dir) / "grid.csv" : fs::path(out);
  write_text(out_path, block_stats_csv(stats));
  std::cerr << "grid " << grid.n_s << "x" << grid.n_l << " over " << points.size()
            << " points (" << grid.out_of_region << " outside the region) -> "
            << out_path.string() << "\n";
  return kOk;
}

int cmd_stage(CommonArgs& common, const std::string& points_path,
              const std::string& bounds_path, std::optional<int> epoch,
              std::optional<int> stage_k, const std::string& out,
              const std::string& pool_out, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> per_scene_k) {
  auto& cfg = common.cfg;
  if (seed) cfg.seed = *seed;
  if (per_scene_k) cfg.per_scene_k = per_scene_k;

  if (epoch.has_value() == stage_k.has_value())
    throw UsageError("stage: give exactly one of --epoch or --k");

  require_input(points_path, "points file");
  const auto points = read_quality_points(points_path);
  const auto schedule = cli::schedule_from(cfg);

  const StageConfig* stage = nullptr;
  if (epoch) {
    stage = &stage_for_epoch(schedule, *epoch);
  } else {
    if (*stage_k < 0 || std::size_t(*stage_k) >= schedule.stages.size())
      throw UsageError("stage index " + std::to_string(*stage_k) +
                       " outside schedule with " +
                       std::to_string(schedule.stages.size()) + " stages");
    stage = &schedule.stages[std::size_t(*stage_k)];
  }

  const auto b = load_or_compute_bounds(bounds_path, points, cfg);
  const auto pool = build_stage_pool(points, b, *stage, cfg);

  const fs::path out_path =
      out.empty() ? fs::path(cfg.output_dir) / ("stage" + std::to_string(stage->k) + ".manifest")
                  : fs::path(out);
  ensure_parent_dir(out_path);
  const auto manifest =
      emit_manifest(pool, int(stage->k), to_string(stage->mode), cfg.seed, out_path);
  if (!pool_out.empty()) {
    ensure_parent_dir(pool_out);
    write_quality_points(pool, pool_out);
  }
  std::cerr << "stage " << stage->k << " (" << to_string(stage->mode) << ", epochs "
            << stage->epoch_begin << "-" << stage->epoch_end << "): " << pool.size()
            << " of " << points.size() << " points -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_manifest_verify(const std::string& manifest_path, const std::string& points_path) {
  require_input(manifest_path, "manifest");
  require_input(points_path, "points file");
  const auto pool = read_quality_points(points_path);
  const auto v = verify_manifest(manifest_path, pool);

  std::cout << "manifest: " << manifest_path << "\n";
  std::cout << "digest: " << (v.digest_ok ? "ok" : "MISMATCH") << "\n";
  std::cout << "unique: ";
  if (v.entries_unique) {
    std::cout << "ok\n";
  } else {
    std::cout << v.duplicate_entries << " duplicate entries\n";
  }
  std::cout << "set-equality: ";
  if (v.set_equal) {
    std::cout << "ok\n";
  } else {
    std::cout << v.missing_from_manifest << " missing, " << v.not_in_pool
              << " not in pool\n";
  }
  std::cout << "result: " << (v.passed() ? "PASS" : "FAIL") << "\n";
  return v.passed() ? kOk : kIntegrity;
}

int cmd_refresh(CommonArgs& common, const std::string& points_path,
                const std::string& updates_path, const std::string& out,
                bool recompute_bounds_flag, const std::string& bounds_out) {
  auto& cfg = common.cfg;
  if (recompute_bounds_flag) cfg.recompute_bounds = true;

  require_input(points_path, "points file");
  require_input(updates_path, "updates file");
  const auto points = read_quality_points(points_path);
  const auto updates = read_updates(updates_path);
  const auto result = refresh(points, updates.losses, updates.scores);

  const fs::path out_path =
      out.empty() ? fs::path(cfg.output_dir) / "points.refreshed.jsonl" : fs::path(out);
  ensure_parent_dir(out_path);
  write_quality_points(result.points, out_path);

  std::cerr << "applied " << result.report.loss_updates_applied << " loss and "
            << result.report.score_updates_applied << " score updates; "
            << result.report.unmatched << " unmatched -> " << out_path.string() << "\n";

  if (cfg.recompute_bounds) {
    const auto b = compute_bounds(result.points, cfg.pct_lo, cfg.pct_hi);
    const fs::path bpath =
        bounds_out.empty() ? fs::path(cfg.output_dir) / "bounds.json" : fs::path(bounds_out);
    write_text(bpath, bounds_to_json(b));
    std::cerr << "recomputed bounds -> " << bpath.string() << "\n";
  }
  return kOk;
}

int cmd_synth(CommonArgs& common, const std::string& out_dir,
              std::optional<std::size_t> scenes, std::optional<std::size_t> cps,
              std::optional<std::size_t> dim, std::optional<double> corrupt,
              const std::string& separation, std::optional<std::uint64_t> seed) {
  auto& cfg = common.cfg;
  SynthConfig synth = cfg.synth;
  if (scenes) synth.n_scenes = *scenes;
  if (cps) synth.captions_per_scene = *cps;
  if (dim) synth.dim = *dim;
  if (corrupt) synth.corrupt_fraction = *corrupt;
  if (!separation.empty()) synth.separation = separation_from_string(separation);
  if (seed) synth.seed = *seed;

  const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
  const auto schedule = cli::schedule_from(cfg);

  const auto ds = gen_synth_pairs(synth);
  write_synth_dataset(ds, dir);

  ToyPipelineOptions options;
  options.policy = cfg.policy;
  options.pct_lo = cfg.pct_lo;
  options.pct_hi = cfg.pct_hi;
  options.rank = cfg.rank;
  options.per_scene_k = cfg.per_scene_k;
  options.grid_blocks_s = cfg.blocks_s;
  options.grid_blocks_l = cfg.blocks_l;
  const auto result = run_toy_pipeline(synth, schedule, dir, options);

  std::cerr << "synth population: " << ds.captions.size() << " captions over "
            << synth.n_scenes << " scenes (dim " << synth.dim << ", "
            << to_string(synth.separation) << "); quality region " << result.diq_size
            << "; " << result.stages.size() << " stage manifests -> " << dir.string()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dc-scene: quality scoring, dual-indicator filtering and staged "
               "curriculum manifests for scene-caption training sets"};
  app.require_subcommand(1);

  CommonArgs common;

  // score
  auto* score = app.add_subcommand("score", "Join inputs and score every pair");
  std::string score_scene, score_text, score_caps, score_losses, score_out, score_policy;
  score->add_option("--config", common.config, "Config file or scanrefer-default");
  score->add_option("--scene-embeddings", score_scene, "Scene table (.dcse)");
  score->add_option("--text-embeddings", score_text, "Text table (.dcse)");
  score->add_option("--captions", score_caps, "Caption index (JSON-lines)");
  score->add_option("--losses", score_losses, "Loss log (JSON-lines)");
  score->add_option("--out", score_out, "Output points file");
  score->add_option("--policy", score_policy, "raw or cosine");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Percentile band edges over a points file");
  std::string bounds_points, bounds_out;
  std::optional<double> bounds_lo, bounds_hi;
  bounds->add_option("--config", common.config, "Config file or scanrefer-default");
  bounds->add_option("--points", bounds_points, "Points file")->required();
  bounds->add_option("--out", bounds_out, "Output bounds JSON");
  bounds->add_option("--pct-lo", bounds_lo, "Lower percentile rank");
  bounds->add_option("--pct-hi", bounds_hi, "Upper percentile rank");

  // filter
  auto* filter = app.add_subcommand("filter", "Keep points inside the quality bands");
  std::string filter_points, filter_bounds, filter_set = "diq", filter_out;
  std::optional<double> filter_lo, filter_hi;
  filter->add_option("--config", common.config, "Config file or scanrefer-default");
  filter->add_option("--points", filter_points, "Points file")->required();
  filter->add_option("--bounds", filter_bounds, "Bounds JSON (computed when absent)");
  filter->add_option("--set", filter_set, "dis, dil or diq (default diq)");
  filter->add_option("--out", filter_out, "Output points file");
  filter->add_option("--pct-lo", filter_lo, "Lower percentile rank");
  filter->add_option("--pct-hi", filter_hi, "Upper percentile rank");

  // grid-report
  auto* grid = app.add_subcommand("grid-report", "Per-block statistics CSV");
  std::string grid_points, grid_bounds, grid_out;
  std::optional<double> grid_ds, grid_dl;
  std::optional<std::size_t> grid_bs, grid_bl;
  grid->add_option("--config", common.config, "Config file or scanrefer-default");
  grid->add_option("--points", grid_points, "Points file")->required();
  grid->add_option("--bounds", grid_bounds, "Bounds JSON (computed when absent)");
  grid->add_option("--out", grid_out, "Output CSV");
  grid->add_option("--delta-s", grid_ds, "Score step size");
  grid->add_option("--delta-l", grid_dl, "Loss step size");
  grid->add_option("--blocks-s", grid_bs, "Score block count (default 3)");
  grid->add_option("--blocks-l", grid_bl, "Loss block count (default 3)");

  // stage
  auto* stage = app.add_subcommand("stage", "Emit the training manifest for one stage");
  std::string stage_points, stage_bounds, stage_out, stage_pool_out;
  std::optional<int> stage_epoch, stage_index;
  std::optional<std::uint64_t> stage_seed;
  std::optional<std::size_t> stage_topk;
  stage->add_option("--config", common.config, "Config file or scanrefer-default");
  stage->add_option("--points", stage_points, "Points file")->required();
  stage->add_option("--bounds", stage_bounds, "Bounds JSON (computed when absent)");
  stage->add_option("--epoch", stage_epoch, "Select the stage containing this epoch");
  stage->add_option("--k", stage_index, "Select the stage by index");
  stage->add_option("--out", stage_out, "Output manifest path");
  stage->add_option("--pool-out", stage_pool_out, "Also write the stage pool as points");
  stage->add_option("--seed", stage_seed, "Shuffle seed");
  stage->add_option("--per-scene-k", stage_topk, "Keep only the top-k captions per scene");

  // manifest-verify
  auto* verify = app.add_subcommand("manifest-verify", "Check a manifest against its pool");
  std::string verify_manifest_path, verify_points;
  verify->add_option("--manifest", verify_manifest_path, "Manifest file")->required();
  verify->add_option("--points", verify_points, "Pool points file")->required();

  // refresh
  auto* refresh_cmd = app.add_subcommand("refresh", "Merge feedback loss/score updates");
  std::string refresh_points, refresh_updates, refresh_out, refresh_bounds_out;
  bool refresh_recompute = false;
  refresh_cmd->add_option("--config", common.config, "Config file or scanrefer-default");
  refresh_cmd->add_option("--points", refresh_points, "Points file")->required();
  refresh_cmd->add_option("--updates", refresh_updates, "Updates (JSON-lines)")->required();
  refresh_cmd->add_option("--out", refresh_out, "Output points file");
  refresh_cmd->add_flag("--recompute-bounds", refresh_recompute,
                        "Also recompute bounds from the merged points");
  refresh_cmd->add_option("--bounds-out", refresh_bounds_out, "Output bounds JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic population and run the loop");
  std::string synth_dir, synth_separation;
  std::optional<std::size_t> synth_scenes, synth_cps, synth_dim;
  std::optional<double> synth_corrupt;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", common.config, "Config file or scanrefer-default");
  synth->add_option("--out-dir", synth_dir, "Output directory");
  synth->add_option("--scenes", synth_scenes, "Scene count");
  synth->add_option("--captions-per-scene", synth_cps, "Captions per scene");
  synth->add_option("--dim", synth_dim, "Embedding dimension");
  synth->add_option("--corrupt-fraction", synth_corrupt, "Planted corruption fraction [0,1)");
  synth->add_option("--separation", synth_separation, "separable or overlapping");
  synth->add_option("--seed", synth_seed, "Generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    common.load();
    if (score->parsed())
      return cmd_score(common, score_scene, score_text, score_caps, score_losses,
                       score_out, score_policy);
    if (bounds->parsed())
      return cmd_bounds(common, bounds_points, bounds_out, bounds_lo, bounds_hi);
    if (filter->parsed())
      return cmd_filter(common, filter_points, filter_bounds, filter_set, filter_out,
                        filter_lo, filter_hi);
    if (grid->parsed())
      return cmd_grid_report(common, grid_points, grid_bounds, grid_out, grid_ds, grid_dl,
                             grid_bs, grid_bl);
    if (stage->parsed())
      return cmd_stage(common, stage_points, stage_bounds, stage_epoch, stage_index,
                       stage_out, stage_pool_out, stage_seed, stage_topk);
    if (verify->parsed()) return cmd_manifest_verify(verify_manifest_path, verify_points);
    if (refresh_cmd->parsed())
      return cmd_refresh(common, refresh_points, refresh_updates, refresh_out,
                         refresh_recompute, refresh_bounds_out);
    if (synth->parsed())
      return cmd_synth(common, synth_dir, synth_scenes, synth_cps, synth_dim,
                       synth_corrupt, synth_separation, synth_seed);
    std::cerr << "dc-scene: no subcommand selected\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "dc-scene: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "dc-scene: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "dc-scene: " << e.what() << "\n";
    return kFormat;
  } catch (const IntegrityError& e) {
    std::cerr << "dc-scene: " << e.what() << "\n";
    return kIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "dc-scene: " << e.what() << "\n";
    return kOther;
  }
}

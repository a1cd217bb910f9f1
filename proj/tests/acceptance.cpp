// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "dcscene/curriculum.hpp"
#include "dcscene/dataio.hpp"
#include "dcscene/errors.hpp"
#include "dcscene/manifest.hpp"
#include "dcscene/quality.hpp"
#include "dcscene/scoring.hpp"
#include "dcscene/synthbench.hpp"
#include "test_util.hpp"

using namespace dcscene;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::vector<QualityPoint> random_points(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> score(-1.0, 1.0);
  std::uniform_real_distribution<double> loss(0.0, 15.0);
  std::vector<QualityPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({"p" + std::to_string(i), "sc" + std::to_string(i % 31),
                   score(rng), loss(rng)});
  }
  return pts;
}

std::unordered_set<std::string_view> id_view_set(std::span<const QualityPoint> pts) {
  std::unordered_set<std::string_view> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.insert(p.sample_id);
  return out;
}

bool is_subset(std::span<const QualityPoint> small, std::span<const QualityPoint> big) {
  const auto big_ids = id_view_set(big);
  for (const auto& p : small) {
    if (!big_ids.contains(p.sample_id)) return false;
  }
  return true;
}

// ---- criterion 1: set algebra over 1000 random populations ----------------

void set_algebra(Check& c) {
  const auto start = Clock::now();
  std::mt19937 rng(101);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t n = 1 + rng() % 10000;
    const auto pts = random_points(rng, n);
    const auto narrow = compute_bounds(pts, 10.0, 90.0);
    const auto wide = compute_bounds(pts, 2.0, 98.0);

    const auto dis = filter_dis(pts, narrow);
    const auto dil = filter_dil(pts, narrow);
    const auto diq = filter_diq(pts, narrow);

    // DIQ == DIS intersect DIL, exactly
    const auto dil_ids = id_view_set(dil);
    std::vector<QualityPoint> intersect;
    for (const auto& p : dis) {
      if (dil_ids.contains(p.sample_id)) intersect.push_back(p);
    }
    c.require(diq == intersect, "dual filter differs from the band intersection");

    // widening never shrinks
    c.require(is_subset(dis, filter_dis(pts, wide)), "score band shrank when widened");
    c.require(is_subset(dil, filter_dil(pts, wide)), "loss band shrank when widened");
    c.require(is_subset(diq, filter_diq(pts, wide)), "dual band shrank when widened");

    // idempotence
    c.require(filter_dis(dis, narrow) == dis, "score filter not idempotent");
    c.require(filter_dil(dil, narrow) == dil, "loss filter not idempotent");
    c.require(filter_diq(diq, narrow) == diq, "dual filter not idempotent");
    if (!c.ok) return;
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  c.require(elapsed <= 30.0,
            "set-algebra suite took " + std::to_string(elapsed) + "s (budget 30s)");
}

// ---- criterion 2: percentile vs an independent oracle, bit-equal ----------

double percentile_oracle(std::vector<double> v, double p) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    double key = v[i];
    std::size_t j = i;
    while (j > 0 && v[j - 1] > key) {
      v[j] = v[j - 1];
      --j;
    }
    v[j] = key;
  }
  const std::size_t n = v.size();
  const double h = double(n - 1) * p / 100.0;
  std::size_t lo = 0;
  while (double(lo + 1) <= h) ++lo;
  if (lo + 1 >= n) return v[n - 1];
  return v[lo] + (h - double(lo)) * (v[lo + 1] - v[lo]);
}

void percentile_matches_oracle(Check& c) {
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> val(-1000.0, 1000.0);
  std::uniform_real_distribution<double> rank(0.0, 100.0);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<double> v;
    if (iter % 25 == 0) {
      v.assign(1, val(rng));
    } else if (iter % 25 == 1) {
      v.assign(2 + rng() % 64, val(rng));
    } else {
      v.resize(1 + rng() % 512);
      for (auto& x : v) x = val(rng);
    }
    for (const double p : {0.0, 5.0, 95.0, 100.0, rank(rng), rank(rng)}) {
      const double got = percentile(v, p);
      const double want = percentile_oracle(v, p);
      c.require(std::bit_cast<std::uint64_t>(got) == std::bit_cast<std::uint64_t>(want),
                "percentile(" + std::to_string(p) + ") != oracle on n=" +
                    std::to_string(v.size()));
      if (!c.ok) return;
    }
  }
}

// ---- criterion 3: stage pools shrink as thresholds rise --------------------

void threshold_monotonicity(Check& c) {
  std::mt19937 rng(303);
  for (int iter = 0; iter < 100; ++iter) {
    const auto pts = random_points(rng, 200 + rng() % 9800);
    const auto b = compute_bounds(pts);
    const double ds = (b.s_max - b.s_min) / 3.0;
    const double dl = (b.l_max - b.l_min) / 3.0;
    if (!(ds > 0.0) || !(dl > 0.0)) continue;
    for (const bool upper : {true, false}) {
      auto prev = select_stage_threshold(pts, b, 0, ds, dl, upper);
      for (std::size_t k = 1; k <= 2; ++k) {
        const auto next = select_stage_threshold(pts, b, k, ds, dl, upper);
        c.require(is_subset(next, prev),
                  "stage " + std::to_string(k) + " pool is not nested in stage " +
                      std::to_string(k - 1));
        prev = next;
      }
    }
    if (!c.ok) return;
  }
}

// ---- criterion 4: built-in schedule preset ---------------------------------

void preset_schedule(Check& c) {
  const auto s = scanrefer_default_schedule();
  c.require(s.total_epochs == 1080, "preset total epochs != 1080");
  c.require(s.stages.size() == 3, "preset must have three stages");
  const double fractions[] = {0.25, 0.50, 0.75};
  const int begins[] = {1, 361, 721};
  const int ends[] = {360, 720, 1080};
  for (std::size_t k = 0; k < 3; ++k) {
    c.require(s.stages[k].mode == StageMode::fraction, "preset stage mode");
    c.require(s.stages[k].fraction == fractions[k], "preset stage fraction");
    c.require(s.stages[k].epoch_begin == begins[k], "preset stage begin epoch");
    c.require(s.stages[k].epoch_end == ends[k], "preset stage end epoch");
  }
  c.require(stage_for_epoch(s, 360).k == 0, "epoch 360 must map to stage 0");
  c.require(stage_for_epoch(s, 361).k == 1, "epoch 361 must map to stage 1");
  c.require(stage_for_epoch(s, 720).k == 1, "epoch 720 must map to stage 1");
  c.require(stage_for_epoch(s, 721).k == 2, "epoch 721 must map to stage 2");

  // nested ceiling-sized pools over one fixed ranking
  std::mt19937 rng(404);
  const auto ranked = rank_quality(random_points(rng, 1237), {0.5, 0.5});
  std::vector<QualityPoint> prev;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto pool = select_top_fraction(ranked, s.stages[k].fraction);
    const auto want = std::size_t(std::ceil(s.stages[k].fraction * 1237.0));
    c.require(pool.size() == want, "fraction pool size differs from the ceiling rule");
    c.require(std::equal(prev.begin(), prev.end(), pool.begin()),
              "fraction pools are not nested prefixes");
    prev = pool;
  }
}

// ---- criterion 5: batch/scalar scoring equivalence -------------------------

void scoring_equivalence(Check& c) {
  std::mt19937 rng(505);
  std::uniform_real_distribution<float> dist(-1.f, 1.f);
  const std::size_t dim = 512, n_text = 10000, n_scene = 64;

  EmbeddingTable scenes, texts;
  scenes.count = n_scene;
  scenes.dim = dim;
  scenes.rows.resize(n_scene * dim);
  for (auto& x : scenes.rows) x = dist(rng);
  for (std::size_t i = 0; i < n_scene; ++i) scenes.ids.push_back("s" + std::to_string(i));
  texts.count = n_text;
  texts.dim = dim;
  texts.rows.resize(n_text * dim);
  for (auto& x : texts.rows) x = dist(rng);
  for (std::size_t i = 0; i < n_text; ++i) texts.ids.push_back("t" + std::to_string(i));

  std::vector<JoinedSample> samples;
  samples.reserve(n_text);
  for (std::size_t j = 0; j < n_text; ++j) {
    samples.push_back({texts.ids[j], scenes.ids[j % n_scene], j % n_scene, j, 1.0});
  }

  for (const auto policy : {ScorePolicy::raw, ScorePolicy::cosine}) {
    const auto batch = score_all(scenes, texts, samples, policy);
    double worst = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const double scalar =
          clip_score(scenes.row(samples[j].scene_row), texts.row(samples[j].text_row),
                     policy);
      worst = std::max(worst, std::abs(batch[j].clip_score - scalar));
    }
    c.require(worst <= 1e-6, std::string("batch/scalar gap ") + std::to_string(worst) +
                                 " over 1e-6 (" + std::string(to_string(policy)) + ")");
    if (policy == ScorePolicy::cosine) {
      for (const auto& p : batch) {
        c.require(p.clip_score >= -1.0 - 1e-6 && p.clip_score <= 1.0 + 1e-6,
                  "cosine score outside [-1, 1] + 1e-6");
        if (!c.ok) return;
      }
    }
  }
}

// ---- criterion 6: separable-synth purity ------------------------------------

void separable_purity(Check& c) {
  testutil::TempDir dir;
  const auto schedule = scanrefer_default_schedule();

  SynthConfig cfg;
  cfg.n_scenes = 100;
  cfg.captions_per_scene = 50;
  cfg.dim = 24;
  cfg.corrupt_fraction = 0.2;
  cfg.separation = Separation::separable;
  cfg.seed = 606;

  const auto result = run_toy_pipeline(cfg, schedule, dir.path());
  c.require(result.stages.size() == 3, "pipeline must emit three stages");
  c.require(result.stages[0].corrupted_in_pool == 0,
            "top-25% pool contains " + std::to_string(result.stages[0].corrupted_in_pool) +
                " corrupted samples");

  // with zero corruption, stage pools must be exact nested prefixes of the
  // recomputed quality ranking
  cfg.corrupt_fraction = 0.0;
  const auto clean = run_toy_pipeline(cfg, schedule, dir.path());
  const auto ds = gen_synth_pairs(cfg);
  const auto join = join_dataset(ds.captions, ds.scene_emb, ds.text_emb, ds.losses);
  const auto points = score_all(ds.scene_emb, ds.text_emb, join.samples);
  const auto bounds = compute_bounds(points);
  const auto ranked = rank_quality(filter_diq(points, bounds), QualityRank{});
  for (const auto& stage : clean.stages) {
    c.require(stage.corrupted_in_pool == 0, "clean population reported corruption");
    c.require(stage.pool_ids.size() <= ranked.size(), "stage pool larger than ranking");
    for (std::size_t i = 0; i < stage.pool_ids.size(); ++i) {
      if (stage.pool_ids[i] != ranked[i].sample_id) {
        c.require(false, "stage pool is not a prefix of the quality ranking");
        return;
      }
    }
  }
}

// ---- criterion 7: end-to-end determinism ------------------------------------

void determinism(Check& c) {
  const std::vector<SampleId> ids = {"a", "b", "c", "d"};
  const std::vector<SampleId> frozen = {"c", "a", "d", "b"};
  c.require(shuffle_deterministic(ids, 42) == frozen,
            "seed-42 permutation differs from the frozen reference");

  testutil::TempDir d1, d2;
  SynthConfig cfg;
  cfg.n_scenes = 60;
  cfg.captions_per_scene = 20;
  cfg.dim = 12;
  cfg.corrupt_fraction = 0.15;
  cfg.seed = 707;
  const auto schedule = scanrefer_default_schedule();
  run_toy_pipeline(cfg, schedule, d1.path());
  run_toy_pipeline(cfg, schedule, d2.path());

  c.require(testutil::read_file(d1 / "report.json") ==
                testutil::read_file(d2 / "report.json"),
            "pipeline reports differ between identical runs");
  for (int k = 0; k < 3; ++k) {
    const auto name = "stage" + std::to_string(k) + ".manifest";
    const auto m1 = testutil::read_file(d1 / name);
    c.require(!m1.empty(), name + " is empty");
    c.require(m1 == testutil::read_file(d2 / name),
              name + " differs between identical runs");
  }
}

// ---- criterion 8: toy caption-loss oracle -----------------------------------

double loss_oracle(std::span<const std::uint32_t> tokens, const ToyLM& lm) {
  std::vector<double> terms;
  terms.push_back(lm.log_start(tokens[0]));
  for (std::size_t t = 1; t < tokens.size(); ++t)
    terms.push_back(lm.log_bigram(tokens[t - 1], tokens[t]));
  double sum = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) sum += *it;
  return -sum;
}

void toy_loss_oracle(Check& c) {
  const auto uniform = ToyLM::uniform(4);
  const std::uint32_t caption[] = {2, 0, 3};
  const double got = toy_caption_loss(caption, uniform);
  c.require(std::abs(got - 3.0 * std::log(4.0)) <= 1e-12,
            "uniform V=4 length-3 loss is " + std::to_string(got));

  std::mt19937 rng(808);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t vocab = 2 + rng() % 24;
    const auto lm = ToyLM::random(vocab, rng());
    std::vector<std::uint32_t> tokens(1 + rng() % 32);
    for (auto& t : tokens) t = rng() % vocab;
    const double a = toy_caption_loss(tokens, lm);
    const double b = loss_oracle(tokens, lm);
    c.require(std::abs(a - b) <= 1e-12, "toy loss differs from the summation oracle");
    if (!c.ok) return;
  }
}

// ---- criterion 9: format conformance ----------------------------------------

std::string encode_dcse(std::uint64_t count, std::uint32_t dim, std::uint32_t flags,
                        const std::vector<std::string>& ids,
                        const std::vector<float>& values, std::uint32_t version = 1) {
  std::string out = "DCSE";
  auto u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
  };
  auto u64 = [&out](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
  };
  u32(version);
  u64(count);
  u32(dim);
  u32(flags);
  for (const auto& id : ids) {
    out.push_back(char(id.size() & 0xff));
    out.push_back(char((id.size() >> 8) & 0xff));
    out += id;
  }
  for (float f : values) u32(std::bit_cast<std::uint32_t>(f));
  return out;
}

template <typename Err, typename Fn>
bool throws(Fn&& fn) {
  try {
    fn();
  } catch (const Err&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

void format_conformance(Check& c) {
  testutil::TempDir dir;

  // byte-identical table round-trip
  std::mt19937 rng(909);
  std::uniform_real_distribution<float> dist(-2.f, 2.f);
  EmbeddingTable t;
  t.count = 257;
  t.dim = 19;
  t.rows.resize(t.count * t.dim);
  for (auto& x : t.rows) x = dist(rng);
  for (std::size_t i = 0; i < t.count; ++i) t.ids.push_back("row" + std::to_string(i));
  const auto p1 = dir / "a.dcse";
  const auto p2 = dir / "b.dcse";
  write_embedding_table(t, p1);
  write_embedding_table(read_embedding_table(p1), p2);
  c.require(testutil::read_file(p1) == testutil::read_file(p2),
            "table round-trip is not byte-identical");

  // byte-identical manifest round-trip via re-emission
  std::vector<QualityPoint> pool;
  for (int i = 0; i < 500; ++i) pool.push_back({"m" + std::to_string(i), "s", 0.1, 0.2});
  const auto m1 = dir / "a.manifest";
  const auto m2 = dir / "b.manifest";
  emit_manifest(pool, 1, "fraction", 99, m1);
  const auto parsed = read_manifest(m1);
  std::vector<QualityPoint> parsed_pool;
  for (const auto& id : parsed.entries) parsed_pool.push_back({id, "s", 0.1, 0.2});
  emit_manifest(parsed_pool, parsed.stage_k, parsed.mode, parsed.seed, m2);
  c.require(testutil::read_file(m1) == testutil::read_file(m2),
            "manifest re-emission is not byte-identical");
  c.require(verify_manifest(m1, pool).passed(), "round-trip manifest fails verification");

  // every documented error class, from a corrupted fixture each
  const std::vector<float> row = {0.6f, 0.8f};
  const auto fixture = [&dir](const char* name, const std::string& bytes) {
    const auto p = dir / name;
    testutil::write_file(p, bytes);
    return p;
  };

  auto bad_magic = encode_dcse(1, 2, 0, {"a"}, row);
  bad_magic[1] = 'X';
  c.require(throws<FormatError>([&] {
              read_embedding_table(fixture("magic.dcse", bad_magic));
            }),
            "bad magic must be a format error");
  c.require(throws<FormatError>([&] {
              read_embedding_table(fixture("ver.dcse", encode_dcse(1, 2, 0, {"a"}, row, 3)));
            }),
            "bad version must be a format error");
  auto truncated = encode_dcse(2, 2, 0, {"a", "b"}, row);  // one row short
  c.require(throws<FormatError>([&] {
              read_embedding_table(fixture("trunc.dcse", truncated));
            }),
            "truncated payload must be a format error");
  c.require(throws<FormatError>([&] {
              read_embedding_table(
                  fixture("trail.dcse", encode_dcse(1, 2, 0, {"a"}, row) + "x"));
            }),
            "count-dim/payload mismatch must be a format error");
  const float nan = std::numeric_limits<float>::quiet_NaN();
  c.require(throws<FormatError>([&] {
              read_embedding_table(fixture("nan.dcse", encode_dcse(1, 2, 0, {"a"}, {1.f, nan})));
            }),
            "non-finite payload must be a format error");
  c.require(throws<IntegrityError>([&] {
              read_embedding_table(
                  fixture("dup.dcse", encode_dcse(2, 2, 0, {"a", "a"}, {1, 0, 0, 1})));
            }),
            "duplicate id must be an integrity error");
  c.require(throws<IntegrityError>([&] {
              read_embedding_table(
                  fixture("norm.dcse", encode_dcse(1, 2, 1, {"a"}, {3.f, 4.f})));
            }),
            "norm violation must be an integrity error");
  c.require(throws<IoError>([&] { read_embedding_table(dir / "absent.dcse"); }),
            "missing file must be an io error");

  c.require(throws<FormatError>([&] { read_loss_log(fixture("l1.jsonl", "{oops\n")); }),
            "malformed loss line must be a format error");
  c.require(throws<IntegrityError>([&] {
              read_loss_log(fixture("l2.jsonl", "{\"sample_id\":\"a\",\"loss\":-1}\n"));
            }),
            "negative loss must be an integrity error");
  c.require(throws<IntegrityError>([&] {
              read_caption_index(fixture("c1.jsonl",
                                         "{\"sample_id\":\"a\",\"scene_id\":\"s\"}\n"
                                         "{\"sample_id\":\"a\",\"scene_id\":\"s\"}\n"));
            }),
            "duplicate caption id must be an integrity error");
  c.require(throws<IntegrityError>([&] {
              read_quality_points(
                  fixture("q1.jsonl", "{\"sample_id\":\"a\",\"scene_id\":\"s\","
                                      "\"clip_score\":0.1,\"caption_loss\":-2}\n"));
            }),
            "negative caption loss must be an integrity error");
  c.require(throws<FormatError>([&] {
              read_manifest(fixture("m1.manifest", "#wrong v1\n"));
            }),
            "bad manifest header must be a format error");
  c.require(throws<FormatError>([&] {
              read_manifest(fixture("m2.manifest",
                                    "#dcscene-manifest v1\n#stage=x mode=m seed=1 "
                                    "digest=0000000000000000\n"));
            }),
            "bad manifest metadata must be a format error");

  // verification failure classes on a tampered manifest
  auto tampered = testutil::read_file(m1);
  const auto pos = tampered.find("m42\n");
  tampered.erase(pos, 4);
  testutil::write_file(dir / "tampered.manifest", tampered);
  const auto v = verify_manifest(dir / "tampered.manifest", pool);
  c.require(!v.digest_ok && !v.set_equal && v.entries_unique,
            "tampered manifest must fail digest and set-equality");
}

// ---- criterion 10: throughput budgets ----------------------------------------

void throughput(Check& c) {
  {
    const std::size_t dim = 512, n_text = 1000000, n_scene = 1000;
    SplitMix64 fill(1);
    EmbeddingTable scenes, texts;
    scenes.count = n_scene;
    scenes.dim = dim;
    scenes.rows.resize(n_scene * dim);
    texts.count = n_text;
    texts.dim = dim;
    texts.rows.resize(n_text * dim);
    for (auto& x : scenes.rows)
      x = float(double(fill.next() >> 11) * 0x1.0p-53) - 0.5f;
    for (auto& x : texts.rows)
      x = float(double(fill.next() >> 11) * 0x1.0p-53) - 0.5f;
    for (std::size_t i = 0; i < n_scene; ++i) scenes.ids.push_back("s" + std::to_string(i));
    for (std::size_t i = 0; i < n_text; ++i) texts.ids.push_back("t" + std::to_string(i));

    std::vector<JoinedSample> samples;
    samples.reserve(n_text);
    for (std::size_t j = 0; j < n_text; ++j)
      samples.push_back({texts.ids[j], scenes.ids[j % n_scene], j % n_scene, j, 1.0});

    const auto start = Clock::now();
    const auto points = score_all(scenes, texts, samples, ScorePolicy::cosine);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    c.require(points.size() == n_text, "scoring dropped samples");
    c.require(elapsed <= 2.0, "scoring 1e6 pairs took " + std::to_string(elapsed) +
                                  "s (budget 2s)");
    std::fprintf(stderr, "  scoring 1e6 pairs @ D=512: %.3fs\n", elapsed);
  }

  {
    testutil::TempDir dir;
    SynthConfig cfg;
    cfg.n_scenes = 2000;
    cfg.captions_per_scene = 50;  // 1e5 samples
    cfg.dim = 32;
    cfg.corrupt_fraction = 0.2;
    cfg.seed = 1010;
    const auto schedule = scanrefer_default_schedule();
    const auto start = Clock::now();
    const auto result = run_toy_pipeline(cfg, schedule, dir.path());
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    c.require(result.stages.size() == 3, "pipeline must run three stages");
    c.require(elapsed <= 10.0, "synth pipeline over 1e5 samples took " +
                                   std::to_string(elapsed) + "s (budget 10s)");
    std::fprintf(stderr, "  synth pipeline 1e5 samples, 3 stages: %.3fs\n", elapsed);
  }
}

// ---- criterion 11: nine-region grid report through the CLI -------------------

int run_cli(const testutil::TempDir& dir, const std::string& args, const char* tag) {
  const std::string cmd = std::string(DC_SCENE_BIN) + " " + args + " > " +
                          (dir / (std::string(tag) + ".out")).string() + " 2> " +
                          (dir / (std::string(tag) + ".err")).string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void nine_region_report(Check& c) {
  testutil::TempDir dir;
  const auto synth_dir = (dir / "synth").string();
  c.require(run_cli(dir,
                    "synth --out-dir " + synth_dir +
                        " --scenes 80 --captions-per-scene 25 --dim 16"
                        " --corrupt-fraction 0.3 --separation overlapping --seed 12",
                    "synth") == 0,
            "synth subcommand failed");
  const auto points = (dir / "points.jsonl").string();
  c.require(run_cli(dir,
                    "score --scene-embeddings " + synth_dir + "/scene.dcse"
                        " --text-embeddings " + synth_dir + "/text.dcse"
                        " --captions " + synth_dir + "/captions.jsonl"
                        " --losses " + synth_dir + "/losses.jsonl --out " + points,
                    "score") == 0,
            "score subcommand failed");
  const auto filtered = (dir / "filtered.jsonl").string();
  c.require(run_cli(dir, "filter --points " + points + " --out " + filtered, "filter") == 0,
            "filter subcommand failed");
  const auto csv_path = (dir / "grid.csv").string();
  c.require(run_cli(dir, "grid-report --points " + points + " --out " + csv_path,
                    "grid") == 0,
            "grid-report subcommand failed");

  const auto csv = testutil::read_file(csv_path);
  std::size_t rows = 0, sum = 0;
  std::size_t line_start = csv.find('\n') + 1;
  while (line_start < csv.size()) {
    const auto c1 = csv.find(',', line_start);
    const auto c2 = csv.find(',', c1 + 1);
    const auto c3 = csv.find(',', c2 + 1);
    sum += std::stoul(csv.substr(c2 + 1, c3 - c2 - 1));
    ++rows;
    line_start = csv.find('\n', line_start) + 1;
  }
  std::size_t diq_size = 0;
  for (char ch : testutil::read_file(filtered)) diq_size += ch == '\n';

  c.require(rows == 9, "grid report must emit exactly nine blocks, got " +
                           std::to_string(rows));
  c.require(sum == diq_size, "block counts sum to " + std::to_string(sum) +
                                 ", quality region holds " + std::to_string(diq_size));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    void (*fn)(Check&);
  };
  const Criterion criteria[] = {
      {1, "set-algebra suite over 1000 random populations", set_algebra},
      {2, "percentile bit-equal to the independent oracle", percentile_matches_oracle},
      {3, "threshold-stage pools nest as k rises", threshold_monotonicity},
      {4, "built-in scanrefer-default schedule reproduction", preset_schedule},
      {5, "batch/scalar scoring equivalence at 1e-6", scoring_equivalence},
      {6, "separable-synth purity of the top-fraction pools", separable_purity},
      {7, "end-to-end determinism and frozen shuffle fixture", determinism},
      {8, "toy caption-loss oracle at 1e-12", toy_loss_oracle},
      {9, "format conformance and error-class coverage", format_conformance},
      {10, "throughput budgets (2s scoring, 10s pipeline)", throughput},
      {11, "nine-region grid report through the CLI", nine_region_report},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = Clock::now();
    try {
      criterion.fn(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("unexpected exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", check.ok ? "PASS" : "FAIL",
                criterion.id, criterion.title, elapsed, check.ok ? "" : " -- ",
                check.ok ? "" : check.detail.c_str());
    std::fflush(stdout);
    failures += check.ok ? 0 : 1;
  }
  return failures;
}

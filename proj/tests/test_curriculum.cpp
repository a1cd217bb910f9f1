// SPDX-License-Identifier: Apache-2.0
#include "dcscene/curriculum.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <doctest.h>

#include "dcscene/errors.hpp"

using namespace dcscene;

namespace {

std::vector<QualityPoint> random_points(std::mt19937& rng, std::size_t n,
                                        std::size_t scenes = 13) {
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_real_distribution<double> loss(0.0, 10.0);
  std::vector<QualityPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({"p" + std::to_string(i), "sc" + std::to_string(i % scenes),
                   score(rng), loss(rng)});
  }
  return pts;
}

std::unordered_set<std::string> id_set(std::span<const QualityPoint> pts) {
  std::unordered_set<std::string> out;
  for (const auto& p : pts) out.insert(p.sample_id);
  return out;
}

}  // namespace

TEST_CASE("stage thresholds advance linearly") {
  PercentileBounds b{0.0, 1.0, 1.5, 9.0, 5, 95};
  const auto t0 = stage_thresholds(b, 0, 0.1, 0.25);
  CHECK(t0.s_p == 0.0);
  CHECK(t0.l_p == 1.5);

  const auto t2 = stage_thresholds(b, 2, 0.1, 0.25);
  CHECK(t2.s_p == doctest::Approx(0.2).epsilon(1e-12));

  const auto t1 = stage_thresholds(b, 1, 0.1, 0.25);
  CHECK(t1.l_p == doctest::Approx(1.75).epsilon(1e-12));

  CHECK_THROWS_AS(stage_thresholds(b, 1, 0.0, 0.25), UsageError);
}

TEST_CASE("threshold-mode stage selection") {
  SUBCASE("k=0 with upper bounds is exactly the dual filter") {
    std::mt19937 rng(11);
    const auto pts = random_points(rng, 4000);
    const auto b = compute_bounds(pts);
    const auto c0 = select_stage_threshold(pts, b, 0, 0.1, 0.5, true);
    CHECK(c0 == filter_diq(pts, b));
  }
  SUBCASE("lower thresholds drop the low points") {
    std::vector<QualityPoint> pts = {{"a", "s", 0.05, 0.05},
                                     {"b", "s", 0.15, 0.15},
                                     {"c", "s", 0.25, 0.25}};
    PercentileBounds b{0.0, 1.0, 0.0, 1.0, 5, 95};
    const auto c1 = select_stage_threshold(pts, b, 1, 0.1, 0.1, false);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0].sample_id == "b");
    CHECK(c1[1].sample_id == "c");
  }
  SUBCASE("successive stage pools are nested") {
    std::mt19937 rng(22);
    for (int iter = 0; iter < 10; ++iter) {
      const auto pts = random_points(rng, 2000 + rng() % 8000);
      const auto b = compute_bounds(pts);
      const double ds = (b.s_max - b.s_min) / 3.0;
      const double dl = (b.l_max - b.l_min) / 3.0;
      for (const bool upper : {true, false}) {
        auto prev = select_stage_threshold(pts, b, 0, ds, dl, upper);
        for (std::size_t k = 1; k <= 3; ++k) {
          const auto next = select_stage_threshold(pts, b, k, ds, dl, upper);
          const auto prev_ids = id_set(prev);
          for (const auto& p : next) CHECK(prev_ids.contains(p.sample_id));
          CHECK(next.size() <= prev.size());
          prev = next;
        }
      }
    }
  }
}

TEST_CASE("quality ranking") {
  std::vector<QualityPoint> pts = {
      {"d", "s", 0.9, 1.0},
      {"a", "s", 0.1, 9.0},
      {"c", "s", 0.5, 5.0},
      {"b", "s", 0.7, 3.0},
  };

  SUBCASE("all weight on the score sorts by score descending") {
    const auto ranked = rank_quality(pts, {1.0, 0.0});
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].sample_id == "d");
    CHECK(ranked[1].sample_id == "b");
    CHECK(ranked[2].sample_id == "c");
    CHECK(ranked[3].sample_id == "a");
  }
  SUBCASE("all weight on the loss sorts by loss descending") {
    const auto ranked = rank_quality(pts, {0.0, 1.0});
    CHECK(ranked[0].sample_id == "a");
    CHECK(ranked[3].sample_id == "d");
  }
  SUBCASE("ties break by ascending sample id") {
    std::vector<QualityPoint> tied = {
        {"z", "s", 0.5, 2.0}, {"m", "s", 0.5, 2.0}, {"a", "s", 0.5, 2.0},
        {"q", "s", 0.9, 2.0}};
    const auto ranked = rank_quality(tied, {0.5, 0.5});
    CHECK(ranked[0].sample_id == "q");
    CHECK(ranked[1].sample_id == "a");
    CHECK(ranked[2].sample_id == "m");
    CHECK(ranked[3].sample_id == "z");
  }
  SUBCASE("a degenerate axis contributes a flat 0.5") {
    std::vector<QualityPoint> flat = {
        {"a", "s", 0.5, 1.0}, {"b", "s", 0.5, 9.0}, {"c", "s", 0.5, 5.0}};
    const auto ranked = rank_quality(flat, {0.5, 0.5});
    CHECK(ranked[0].sample_id == "b");  // loss still orders
    CHECK(ranked[1].sample_id == "c");
    CHECK(ranked[2].sample_id == "a");
  }
  SUBCASE("any permutation of the input ranks identically") {
    std::mt19937 rng(31);
    auto pts2 = random_points(rng, 500);
    const auto reference = rank_quality(pts2, {0.5, 0.5});
    for (int iter = 0; iter < 5; ++iter) {
      std::shuffle(pts2.begin(), pts2.end(), rng);
      CHECK(rank_quality(pts2, {0.5, 0.5}) == reference);
    }
  }
  SUBCASE("weights must be a convex pair") {
    CHECK_THROWS_AS(rank_quality(pts, {0.7, 0.7}), UsageError);
    CHECK_THROWS_AS(rank_quality(pts, {-0.5, 1.5}), UsageError);
  }
  SUBCASE("empty input") { CHECK(rank_quality({}, {0.5, 0.5}).empty()); }
}

TEST_CASE("top-fraction selection uses the ceiling") {
  std::mt19937 rng(17);
  const auto ranked = rank_quality(random_points(rng, 10), {0.5, 0.5});

  CHECK(select_top_fraction(ranked, 0.25).size() == 3);
  CHECK(select_top_fraction(ranked, 0.5).size() == 5);
  CHECK(select_top_fraction(ranked, 0.75).size() == 8);
  CHECK(select_top_fraction(ranked, 1.0) ==
        std::vector<QualityPoint>(ranked.begin(), ranked.end()));

  const auto four = rank_quality(random_points(rng, 4), {0.5, 0.5});
  CHECK(select_top_fraction(four, 0.25).size() == 1);

  SUBCASE("fractions nest") {
    const auto f25 = select_top_fraction(ranked, 0.25);
    const auto f50 = select_top_fraction(ranked, 0.5);
    const auto f75 = select_top_fraction(ranked, 0.75);
    CHECK(std::equal(f25.begin(), f25.end(), f50.begin()));
    CHECK(std::equal(f50.begin(), f50.end(), f75.begin()));
  }
  SUBCASE("out-of-range fractions") {
    CHECK_THROWS_AS(select_top_fraction(ranked, 0.0), UsageError);
    CHECK_THROWS_AS(select_top_fraction(ranked, 1.5), UsageError);
    CHECK_THROWS_AS(select_top_fraction(ranked, -0.25), UsageError);
  }
  SUBCASE("empty ranked list stays empty") {
    CHECK(select_top_fraction({}, 0.5).empty());
  }
}

TEST_CASE("per-scene top-k") {
  std::vector<QualityPoint> pts = {
      {"a1", "sceneA", 0.9, 1}, {"a2", "sceneA", 0.5, 1}, {"a3", "sceneA", 0.1, 1},
      {"b1", "sceneB", 0.8, 1}, {"b2", "sceneB", 0.7, 1},
  };

  SUBCASE("keeps the top scores per scene") {
    const auto kept = per_scene_topk(pts, 2);
    REQUIRE(kept.size() == 4);
    CHECK(kept[0].sample_id == "a1");
    CHECK(kept[1].sample_id == "a2");
    CHECK(kept[2].sample_id == "b1");
    CHECK(kept[3].sample_id == "b2");
  }
  SUBCASE("large k is the identity") {
    CHECK(per_scene_topk(pts, 10) == pts);
  }
  SUBCASE("score ties break by ascending sample id") {
    std::vector<QualityPoint> tied = {
        {"x2", "s", 0.5, 1}, {"x1", "s", 0.5, 1}, {"x3", "s", 0.5, 1}};
    const auto kept = per_scene_topk(tied, 2);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].sample_id == "x2");  // input order preserved
    CHECK(kept[1].sample_id == "x1");
  }
  SUBCASE("k must be positive") { CHECK_THROWS_AS(per_scene_topk(pts, 0), UsageError); }

  SUBCASE("matches a group-and-sort oracle on random data") {
    std::mt19937 rng(41);
    for (int iter = 0; iter < 10; ++iter) {
      const auto data = random_points(rng, 500 + rng() % 1000, 7);
      const std::size_t k = 1 + rng() % 12;
      const auto kept = per_scene_topk(data, k);

      // oracle: per scene, sort by (score desc, id asc) and mark the first k
      std::unordered_map<std::string, std::vector<QualityPoint>> groups;
      for (const auto& p : data) groups[p.scene_id].push_back(p);
      std::unordered_set<std::string> expected;
      for (auto& [scene, members] : groups) {
        std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
          if (a.clip_score != b.clip_score) return a.clip_score > b.clip_score;
          return a.sample_id < b.sample_id;
        });
        for (std::size_t i = 0; i < std::min(k, members.size()); ++i)
          expected.insert(members[i].sample_id);
      }
      CHECK(id_set(kept) == expected);

      // never more than k per scene, order preserved
      std::unordered_map<std::string, std::size_t> counts;
      for (const auto& p : kept) ++counts[p.scene_id];
      for (const auto& [scene, n] : counts) CHECK(n <= k);
      std::unordered_map<std::string, std::size_t> pos;
      for (std::size_t i = 0; i < data.size(); ++i) pos[data[i].sample_id] = i;
      for (std::size_t i = 1; i < kept.size(); ++i)
        CHECK(pos[kept[i - 1].sample_id] < pos[kept[i].sample_id]);
    }
  }
}

TEST_CASE("schedule construction") {
  SUBCASE("the built-in preset") {
    const auto s = scanrefer_default_schedule();
    REQUIRE(s.stages.size() == 3);
    CHECK(s.total_epochs == 1080);
    CHECK(s.stages[0].fraction == 0.25);
    CHECK(s.stages[0].epoch_begin == 1);
    CHECK(s.stages[0].epoch_end == 360);
    CHECK(s.stages[1].fraction == 0.50);
    CHECK(s.stages[1].epoch_begin == 361);
    CHECK(s.stages[1].epoch_end == 720);
    CHECK(s.stages[2].fraction == 0.75);
    CHECK(s.stages[2].epoch_begin == 721);
    CHECK(s.stages[2].epoch_end == 1080);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(s.stages[k].k == k);
      CHECK(s.stages[k].mode == StageMode::fraction);
    }
  }
  SUBCASE("single full-data stage") {
    const StageSpec spec[] = {{StageMode::fraction, 1.0, true, 50}};
    const auto s = build_schedule(50, spec);
    REQUIRE(s.stages.size() == 1);
    CHECK(s.stages[0].epoch_begin == 1);
    CHECK(s.stages[0].epoch_end == 50);
  }
  SUBCASE("non-ascending epoch ends are rejected") {
    const StageSpec spec[] = {{StageMode::fraction, 0.25, true, 360},
                              {StageMode::fraction, 0.5, true, 360},
                              {StageMode::fraction, 0.75, true, 1080}};
    CHECK_THROWS_AS(build_schedule(1080, spec), UsageError);
  }
  SUBCASE("last stage must end at total_epochs") {
    const StageSpec spec[] = {{StageMode::fraction, 1.0, true, 700}};
    CHECK_THROWS_AS(build_schedule(1080, spec), UsageError);
  }
  SUBCASE("bad fractions are rejected") {
    const StageSpec spec[] = {{StageMode::fraction, 0.0, true, 10}};
    CHECK_THROWS_AS(build_schedule(10, spec), UsageError);
  }
  SUBCASE("empty schedules are rejected") {
    CHECK_THROWS_AS(build_schedule(10, {}), UsageError);
  }
}

TEST_CASE("stage lookup by epoch") {
  const auto s = scanrefer_default_schedule();
  CHECK(stage_for_epoch(s, 1).k == 0);
  CHECK(stage_for_epoch(s, 100).k == 0);
  CHECK(stage_for_epoch(s, 360).k == 0);
  CHECK(stage_for_epoch(s, 361).k == 1);
  CHECK(stage_for_epoch(s, 720).k == 1);
  CHECK(stage_for_epoch(s, 721).k == 2);
  CHECK(stage_for_epoch(s, 1080).k == 2);
  CHECK_THROWS_AS(stage_for_epoch(s, 0), UsageError);
  CHECK_THROWS_AS(stage_for_epoch(s, 1081), UsageError);

  SUBCASE("total on the whole range") {
    for (int e = 1; e <= 1080; ++e) {
      const auto& stage = stage_for_epoch(s, e);
      CHECK(e >= stage.epoch_begin);
      CHECK(e <= stage.epoch_end);
    }
  }
}

TEST_CASE("feedback refresh") {
  std::vector<QualityPoint> pts = {
      {"a", "s1", 0.5, 2.0}, {"b", "s1", 0.7, 3.0}, {"c", "s2", 0.2, 1.0}};

  SUBCASE("loss update replaces the value") {
    const std::vector<LossRecord> updates = {{"a", 1.5}};
    const auto r = refresh(pts, updates);
    CHECK(r.points[0].caption_loss == 1.5);
    CHECK(r.points[0].clip_score == 0.5);
    CHECK(r.points[1] == pts[1]);
    CHECK(r.points[2] == pts[2]);
    CHECK(r.report.loss_updates_applied == 1);
    CHECK(r.report.unmatched == 0);
  }
  SUBCASE("empty update list is the identity") {
    const auto r = refresh(pts, {});
    CHECK(r.points == pts);
    CHECK(r.report.loss_updates_applied == 0);
  }
  SUBCASE("unknown ids pass through and are counted") {
    const std::vector<LossRecord> updates = {{"zz", 1.0}};
    const auto r = refresh(pts, updates);
    CHECK(r.points == pts);
    CHECK(r.report.unmatched == 1);
  }
  SUBCASE("last update wins") {
    const std::vector<LossRecord> updates = {{"a", 9.0}, {"a", 4.0}};
    const auto r = refresh(pts, updates);
    CHECK(r.points[0].caption_loss == 4.0);
    CHECK(r.report.loss_updates_applied == 2);
  }
  SUBCASE("score updates are optional and validated") {
    const std::vector<ScoreUpdate> scores = {{"b", -0.25}};
    const auto r = refresh(pts, {}, scores);
    CHECK(r.points[1].clip_score == -0.25);
    CHECK(r.report.score_updates_applied == 1);
    const std::vector<ScoreUpdate> bad = {{"b", NAN}};
    CHECK_THROWS_AS(refresh(pts, {}, bad), IntegrityError);
  }
  SUBCASE("negative or non-finite losses are integrity errors") {
    CHECK_THROWS_AS(refresh(pts, std::vector<LossRecord>{{"a", -1.0}}), IntegrityError);
    CHECK_THROWS_AS(refresh(pts, std::vector<LossRecord>{{"a", NAN}}), IntegrityError);
  }
  SUBCASE("refreshing twice with the same updates equals refreshing once") {
    const std::vector<LossRecord> updates = {{"a", 1.5}, {"c", 0.25}};
    const std::vector<ScoreUpdate> scores = {{"b", 0.9}};
    const auto once = refresh(pts, updates, scores);
    const auto twice = refresh(once.points, updates, scores);
    CHECK(twice.points == once.points);
  }
}

#include "distnav/metrics.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

using namespace distnav;

namespace {

/// Robot walks straight from (0,0) to (len,0) in `n` steps; one pedestrian
/// sits at lateral distance `sep` from the midpoint (or none if sep < 0).
RunLog straight_log(double len, std::size_t n, double sep, bool reached = true) {
  RunLog log;
  log.name = "straight";
  log.start = {0, 0};
  log.goal = {len, 0};
  log.reached_goal = reached;
  log.human_path_length = len;
  for (std::size_t k = 0; k <= n; ++k) {
    StepRecord s;
    s.time = 0.4 * static_cast<double>(k);
    const Vec2 robot{len * static_cast<double>(k) / static_cast<double>(n), 0.0};
    s.positions.emplace_back(kRobotId, robot);
    if (sep >= 0.0) {
      const Vec2 ped{len / 2, sep};
      s.positions.emplace_back(1, ped);
      s.min_separation = distance(robot, ped);
    }
    if (k < n) s.replan_ms = 2.0 + static_cast<double>(k % 3);
    log.steps.push_back(s);
  }
  return log;
}

RunResult result(double min_sep, double ratio, bool reached = true) {
  RunResult r;
  r.min_sep = min_sep;
  r.has_pedestrians = true;
  const Thresholds th;
  r.collision = min_sep < th.collision_dist;
  r.discomfort = min_sep < th.discomfort_dist;
  r.ratio = ratio;
  r.robot_path = 10 * ratio;
  r.freezing = ratio > th.freezing_ratio;
  r.reached_goal = reached;
  r.duration = 8.0;
  r.replan_ms = {1.0, 3.0};
  return r;
}

}  // namespace

TEST(PathLength, Examples) {
  EXPECT_EQ(path_arc_length({}), 0.0);
  EXPECT_EQ(path_arc_length({{1, 1}}), 0.0);
  EXPECT_DOUBLE_EQ(path_arc_length({{0, 0}, {3, 4}, {3, 0}}), 9.0);
}

TEST(Classify, SeparationThresholds) {
  const Thresholds th;
  const auto near = classify_run(straight_log(10, 20, 0.20), th);
  EXPECT_TRUE(near.collision);
  EXPECT_TRUE(near.discomfort);
  const auto close = classify_run(straight_log(10, 20, 0.25), th);
  EXPECT_FALSE(close.collision);
  EXPECT_TRUE(close.discomfort);
  const auto clear = classify_run(straight_log(10, 20, 1.0), th);
  EXPECT_FALSE(clear.collision);
  EXPECT_FALSE(clear.discomfort);
  EXPECT_DOUBLE_EQ(*clear.min_sep, 1.0);
}

TEST(Classify, RatioDurationAndReplans) {
  const auto r = classify_run(straight_log(10, 20, 1.0), Thresholds{});
  EXPECT_NEAR(r.ratio, 1.0, 1e-12);
  EXPECT_FALSE(r.freezing);
  EXPECT_DOUBLE_EQ(r.duration, 8.0);
  EXPECT_EQ(r.replan_ms.size(), 20u);
  EXPECT_TRUE(r.has_pedestrians);

  const auto detour = classify_run(straight_log(10, 20, 1.0), 7.0, Thresholds{});
  EXPECT_TRUE(detour.freezing);
  EXPECT_NEAR(detour.ratio, 10.0 / 7.0, 1e-12);
}

TEST(Classify, TimeoutCountsAsFreezing) {
  auto log = straight_log(10, 20, 1.0, false);
  log.timeout = true;
  EXPECT_TRUE(classify_run(log, Thresholds{}).freezing);
}

TEST(Classify, NoPedestrians) {
  const auto r = classify_run(straight_log(10, 20, -1.0), Thresholds{});
  EXPECT_FALSE(r.has_pedestrians);
  EXPECT_FALSE(r.min_sep);
  EXPECT_FALSE(r.collision);
  EXPECT_FALSE(r.discomfort);
}

TEST(Classify, Preconditions) {
  EXPECT_THROW(classify_run(RunLog{}, 1.0, Thresholds{}), PreconditionError);
  EXPECT_THROW(classify_run(straight_log(10, 4, 1.0), 0.0, Thresholds{}), PreconditionError);
  Thresholds bad;
  bad.collision_dist = 0.5;
  EXPECT_THROW(classify_run(straight_log(10, 4, 1.0), bad), PreconditionError);
  bad = {};
  bad.freezing_ratio = 1.0;
  EXPECT_THROW(bad.validate(), PreconditionError);
}

TEST(Classify, CollisionImpliesDiscomfort) {
  distnav::fixtures::Gen gen(61);
  for (int k = 0; k < 500; ++k) {
    Thresholds th;
    th.collision_dist = gen.uniform(0.05, 0.5);
    th.discomfort_dist = th.collision_dist + gen.uniform(0.0, 0.5);
    const auto r = classify_run(straight_log(10, 10, gen.uniform(0, 1)), th);
    if (r.collision) {
      EXPECT_TRUE(r.discomfort);
    }
  }
}

TEST(Classify, MonotoneInThresholds) {
  distnav::fixtures::Gen gen(62);
  for (int k = 0; k < 300; ++k) {
    const auto log = straight_log(10, 10, gen.uniform(0, 0.6));
    Thresholds a, b;
    a.collision_dist = gen.uniform(0.05, 0.3);
    b.collision_dist = a.collision_dist + gen.uniform(0, 0.2);
    a.discomfort_dist = b.discomfort_dist = 0.6;
    EXPECT_LE(classify_run(log, a).collision, classify_run(log, b).collision);
  }
}

TEST(Aggregate, CountsAndPercentages) {
  std::vector<RunResult> rs;
  for (int k = 0; k < 100; ++k) rs.push_back(result(k < 3 ? 0.1 : 1.0, 1.0));
  const auto rep = aggregate(rs, Thresholds{});
  EXPECT_EQ(rep.runs, 100u);
  EXPECT_EQ(rep.collisions, 3u);
  EXPECT_DOUBLE_EQ(rep.collision_pct, 3.0);
  EXPECT_DOUBLE_EQ(rep.discomfort_pct, 3.0);
  EXPECT_EQ(rep.replan_ms.count, 200u);
  EXPECT_DOUBLE_EQ(rep.replan_ms.mean, 2.0);
  EXPECT_DOUBLE_EQ(rep.replan_ms.sd, 1.0);
  EXPECT_THROW(aggregate(std::vector<RunResult>{}, Thresholds{}), PreconditionError);
}

TEST(Aggregate, SingleRunHasZeroSpread) {
  const std::vector<RunResult> one{result(0.8, 1.05)};
  const auto rep = aggregate(one, Thresholds{});
  EXPECT_EQ(rep.min_sep.sd, 0.0);
  EXPECT_EQ(rep.path_length.sd, 0.0);
  EXPECT_DOUBLE_EQ(rep.max_ratio, 1.05);
  EXPECT_DOUBLE_EQ(rep.time_to_goal.mean, 8.0);
}

TEST(Aggregate, TimeToGoalOnlyOverReachedRuns) {
  std::vector<RunResult> rs{result(1.0, 1.0, true), result(1.0, 1.0, false)};
  rs[1].duration = 100.0;
  const auto rep = aggregate(rs, Thresholds{});
  EXPECT_EQ(rep.time_to_goal.count, 1u);
  EXPECT_DOUBLE_EQ(rep.time_to_goal.mean, 8.0);
  EXPECT_EQ(rep.goals_reached, 1u);
}

TEST(Aggregate, PermutationInvariant) {
  distnav::fixtures::Gen gen(63);
  std::vector<RunResult> rs;
  for (int k = 0; k < 40; ++k) rs.push_back(result(gen.uniform(0, 2), gen.uniform(1, 2)));
  const auto base = aggregate(rs, Thresholds{});
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(rs.begin(), rs.end(), gen.engine());
    const auto rep = aggregate(rs, Thresholds{});
    EXPECT_EQ(rep.min_sep.mean, base.min_sep.mean);
    EXPECT_EQ(rep.min_sep.sd, base.min_sep.sd);
    EXPECT_EQ(rep.path_length.mean, base.path_length.mean);
    EXPECT_EQ(rep.freezing_pct, base.freezing_pct);
    EXPECT_EQ(rep.max_ratio, base.max_ratio);
  }
}

TEST(Aggregate, HumanBaselineIdentity) {
  // A log that follows the reference path exactly has ratio 1 and never freezes.
  const auto r = classify_run(straight_log(9.5, 19, 2.0), Thresholds{});
  const std::vector<RunResult> one{r};
  const auto rep = aggregate(one, Thresholds{});
  EXPECT_NEAR(rep.max_ratio, 1.0, 1e-12);
  EXPECT_EQ(rep.freezes, 0u);
}

TEST(MeanSd, Examples) {
  const auto m = mean_sd({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_DOUBLE_EQ(m.sd, 2.0);
  EXPECT_EQ(m.count, 8u);
  EXPECT_EQ(mean_sd({}).count, 0u);
}

TEST(Report, JsonAndTable) {
  std::vector<RunResult> rs{result(0.1, 1.0), result(1.0, 1.3)};
  rs[1].has_pedestrians = false;
  rs[1].min_sep.reset();
  const auto rep = aggregate(rs, Thresholds{});
  std::ostringstream js, tab, quiet;
  write_report_json(js, rep);
  write_report_json(quiet, rep, false);
  write_report_table(tab, rep);
  const auto j = nlohmann::json::parse(js.str());
  EXPECT_EQ(j["runs"], 2);
  EXPECT_DOUBLE_EQ(j["collision_pct"].get<double>(), 50.0);
  EXPECT_DOUBLE_EQ(j["freezing_pct"].get<double>(), 50.0);
  EXPECT_EQ(j["mean_min_sep"]["count"], 1);
  EXPECT_EQ(j["counts"]["runs_without_pedestrians"], 1);
  EXPECT_TRUE(j.contains("mean_replan_ms"));
  EXPECT_FALSE(nlohmann::json::parse(quiet.str()).contains("mean_replan_ms"));
  EXPECT_NE(tab.str().find("Collisions"), std::string::npos);
  EXPECT_NE(tab.str().find("50.0%"), std::string::npos);

  std::vector<RunResult> none{result(1.0, 1.0)};
  none[0].has_pedestrians = false;
  none[0].min_sep.reset();
  std::ostringstream na, naj;
  write_report_table(na, aggregate(none, Thresholds{}));
  write_report_json(naj, aggregate(none, Thresholds{}));
  EXPECT_NE(na.str().find("n/a"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(naj.str())["mean_min_sep"]["mean"].is_null());
}

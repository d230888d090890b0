#include "commands.hpp"
#include "sim_fixtures.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace distnav;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("distnav_cmd_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class ReplayCommand : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fresh_dir(std::string("replay_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    testing_data_ = root_ / "walk.txt";
    distnav::fixtures::write_dataset(testing_data_, distnav::fixtures::straight_walk_dataset(30.0, 0.5, true));
    cfg_.mode = Command::Replay;
    cfg_.dataset = testing_data_.string();
  }

  ExperimentConfig config_for(const std::string& out) const {
    ExperimentConfig c = cfg_;
    c.output = (root_ / out).string();
    return c;
  }

  fs::path root_;
  fs::path testing_data_;
  ExperimentConfig cfg_;
};

}  // namespace

TEST_F(ReplayCommand, DryRunListsPartials) {
  std::ostringstream out;
  const auto cfg = config_for("dry");
  EXPECT_FALSE(cli::cmd_replay(cfg, {false, true}, out).has_value());
  EXPECT_FALSE(fs::exists(fs::path(cfg.output) / "report.json"));
  EXPECT_NE(out.str().find("3 partial runs"), std::string::npos);
}

TEST_F(ReplayCommand, ThirtyMetreWalkGivesThreeCleanRuns) {
  std::ostringstream out;
  const auto cfg = config_for("full");
  const auto rep = cli::cmd_replay(cfg, {}, out);
  ASSERT_TRUE(rep.has_value());
  EXPECT_EQ(rep->runs, 3u);
  EXPECT_EQ(rep->collisions, 0u);
  EXPECT_LT(rep->max_ratio, 1.1);
  for (const char* f : {"report.json", "report.txt", "human_report.json", "partials.csv"}) {
    EXPECT_TRUE(fs::exists(fs::path(cfg.output) / f)) << f;
  }
  std::size_t logs = 0;
  for (const auto& e : fs::directory_iterator(fs::path(cfg.output) / "runs")) logs += e.path().extension() == ".csv";
  EXPECT_EQ(logs, 3u);
}

TEST_F(ReplayCommand, NoTimingOutputIsByteIdentical) {
  std::ostringstream out;
  const auto a = config_for("a"), b = config_for("b");
  cli::cmd_replay(a, {true, false}, out);
  cli::cmd_replay(b, {true, false}, out);
  EXPECT_EQ(slurp(fs::path(a.output) / "report.json"), slurp(fs::path(b.output) / "report.json"));
  for (const auto& e : fs::directory_iterator(fs::path(a.output) / "runs")) {
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(b.output) / "runs" / e.path().filename())) << e.path();
  }
}

TEST_F(ReplayCommand, MetricsRecomputesTheSameReport) {
  std::ostringstream out;
  const auto cfg = config_for("src");
  cli::cmd_replay(cfg, {true, false}, out);
  auto m = config_for("recomputed");
  m.mode = Command::Metrics;
  cli::cmd_metrics(m, {fs::path(cfg.output) / "runs"}, {true, false}, out);
  EXPECT_EQ(slurp(fs::path(cfg.output) / "report.json"), slurp(fs::path(m.output) / "report.json"));

  // Idempotent: recomputing from the recomputation's inputs again changes nothing.
  auto again = config_for("again");
  cli::cmd_metrics(again, {fs::path(cfg.output) / "runs"}, {true, false}, out);
  EXPECT_EQ(slurp(fs::path(m.output) / "report.json"), slurp(fs::path(again.output) / "report.json"));
}

TEST_F(ReplayCommand, LargerCollisionDistanceNeverCountsFewer) {
  std::ostringstream out;
  const auto cfg = config_for("mono");
  cli::cmd_replay(cfg, {true, false}, out);
  std::size_t prev = 0;
  for (double d : {0.05, 0.5, 2.0, 5.0, 8.0, 15.0}) {
    auto m = config_for("mono_metrics");
    m.thresholds.collision_dist = d;
    m.thresholds.discomfort_dist = d;
    const auto rep = cli::cmd_metrics(m, {fs::path(cfg.output) / "runs"}, {}, out);
    EXPECT_GE(rep.collisions, prev);
    prev = rep.collisions;
  }
  EXPECT_EQ(prev, 3u);  // the bystander is within 15 m of every run
}

TEST(MetricsCommand, MissingOrEmptyInputsAreErrors) {
  std::ostringstream out;
  ExperimentConfig cfg;
  cfg.output = fresh_dir("metrics_out").string();
  EXPECT_THROW(cli::cmd_metrics(cfg, {fresh_dir("metrics_empty")}, {}, out), InputError);
  EXPECT_THROW(cli::cmd_metrics(cfg, {fs::path("/nonexistent/run.csv")}, {}, out), InputError);
}

TEST(Evolve1dCommand, ZeroSweepsLeavesInputs) {
  std::ostringstream out;
  ExperimentConfig cfg;
  cfg.mode = Command::Evolve1d;
  cfg.output = fresh_dir("evolve0").string();
  cfg.evolve1d.sweeps = 0;
  cfg.evolve1d.grid_points = 201;
  const auto r = cli::cmd_evolve1d(cfg, out);
  ASSERT_EQ(r.objective.size(), 1u);
  const auto init = cfg.evolve1d.initial_densities();
  EXPECT_DOUBLE_EQ(r.objective[0], exact_objective(init, cfg.evolve1d.kernel()));
  std::istringstream csv(slurp(fs::path(cfg.output) / "evolution.csv"));
  std::string line;
  std::getline(csv, line);
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::size_t s, i;
    double x, p;
    fields >> s >> i >> x >> p;
    EXPECT_EQ(s, 0u);
    const auto& d = init[i];
    const auto a = static_cast<std::size_t>(std::lround((x - d.xs.front()) / d.spacing()));
    EXPECT_NEAR(p, d.ps[a], 1e-12 * (1 + d.ps[a]));
    ++rows;
  }
  EXPECT_EQ(rows, 3u * 201u);
}

TEST(Evolve1dCommand, SamplerComparisonWritesKs) {
  std::ostringstream out;
  ExperimentConfig cfg;
  cfg.mode = Command::Evolve1d;
  cfg.output = fresh_dir("evolve_ks").string();
  cfg.compare_sampler = true;
  cfg.samples = 3000;
  cfg.evolve1d.sweeps = 3;
  const auto r = cli::cmd_evolve1d(cfg, out);
  ASSERT_TRUE(r.ks.has_value());
  ASSERT_EQ(r.ks->size(), 3u);
  for (double ks : *r.ks) EXPECT_LT(ks, 0.06);
  EXPECT_NE(slurp(fs::path(cfg.output) / "objective.csv").find("sampler_objective"), std::string::npos);
  for (std::size_t s = 0; s + 1 < r.objective.size(); ++s) EXPECT_LT(r.objective[s + 1], r.objective[s]);
  const auto summary = nlohmann::json::parse(slurp(fs::path(cfg.output) / "summary.json"));
  EXPECT_TRUE(summary["strictly_decreasing"].get<bool>());
  EXPECT_EQ(summary["objective"].size(), r.objective.size());
}

TEST(SimulateCommand, SmallBatch) {
  std::ostringstream out;
  ExperimentConfig cfg;
  cfg.mode = Command::Simulate;
  cfg.output = fresh_dir("simulate").string();
  cfg.runs = 3;
  cfg.jobs = 2;
  cfg.arena.pedestrians = 2;
  const auto rep = cli::cmd_simulate(cfg, {true, false}, out);
  EXPECT_EQ(rep.runs, 3u);
  EXPECT_TRUE(fs::exists(fs::path(cfg.output) / "runs" / "arena_n2_seed1.csv"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.output) / "runs" / "arena_n2_seed3.json"));
}

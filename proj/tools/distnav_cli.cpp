// distnav command-line driver.
//
//   distnav evolve1d  [--compare-sampler --m 20000] [--sweeps N] [--preset wide]
//   distnav replay    --dataset FILE [--dry-run]
//   distnav simulate  [--pedestrians N --runs N]
//   distnav metrics   LOG_OR_DIR...
//   distnav print-config
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration or input error.
#include "commands.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>

namespace {

using namespace distnav;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> m;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  std::optional<std::string> dataset;
  std::optional<std::size_t> sweeps;
  std::optional<std::size_t> pedestrians;
  std::optional<std::size_t> runs;
  std::optional<double> collision_dist;
  std::optional<double> discomfort_dist;
  std::optional<double> freezing_ratio;
  std::optional<std::string> preset;
  bool compare_sampler = false;
  bool verbose = false;
  bool quiet = false;
  cli::RunFlags flags;
  std::vector<std::string> logs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Run seed");
  cmd->add_option("--m", o.m, "Samples per agent");
  cmd->add_option("--jobs", o.jobs, "Parallel runs");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--no-timing", o.flags.no_timing, "Zero wall-time fields for byte-comparable output");
  cmd->add_flag("-v,--verbose", o.verbose, "Debug logging");
  cmd->add_flag("-q,--quiet", o.quiet, "Warnings and errors only");
}

void add_thresholds(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--collision-dist", o.collision_dist, "Collision threshold [m]");
  cmd->add_option("--discomfort-dist", o.discomfort_dist, "Discomfort threshold [m]");
  cmd->add_option("--freezing-ratio", o.freezing_ratio, "Freezing path-length ratio");
}

ExperimentConfig build_config(Command mode, const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  cfg.mode = mode;
  if (o.preset) {
    if (*o.preset == "wide") {
      cfg.evolve1d = Scenario1d::wide();
    } else if (*o.preset != "default") {
      throw InputError("unknown preset '" + *o.preset + "' (default, wide)");
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.m) cfg.samples = *o.m;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.out) cfg.output = *o.out;
  if (o.dataset) cfg.dataset = *o.dataset;
  if (o.sweeps) cfg.evolve1d.sweeps = *o.sweeps;
  if (o.pedestrians) cfg.arena.pedestrians = *o.pedestrians;
  if (o.runs) cfg.runs = *o.runs;
  if (o.collision_dist) cfg.thresholds.collision_dist = *o.collision_dist;
  if (o.discomfort_dist) cfg.thresholds.discomfort_dist = *o.discomfort_dist;
  if (o.freezing_ratio) cfg.thresholds.freezing_ratio = *o.freezing_ratio;
  if (o.compare_sampler) cfg.compare_sampler = true;
  if (o.verbose) cfg.verbosity = "debug";
  if (o.quiet) cfg.verbosity = "warn";
  cfg.validate();
  spdlog::set_level(spdlog::level::from_str(cfg.verbosity));
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd navigation planner with coupled trajectory-distribution prediction"};
  app.require_subcommand(1);
  Overrides o;

  auto* evolve = app.add_subcommand("evolve1d", "Evolve the 1D three-agent problem on a grid");
  add_common(evolve, o);
  evolve->add_option("--sweeps", o.sweeps, "Number of sweeps");
  evolve->add_option("--preset", o.preset, "Scenario preset (default, wide)");
  evolve->add_flag("--compare-sampler", o.compare_sampler, "Also run the sampled engine and report KS distances");

  auto* replay = app.add_subcommand("replay", "Partial-trajectory benchmark on a recorded dataset");
  add_common(replay, o);
  add_thresholds(replay, o);
  replay->add_option("--dataset,dataset", o.dataset, "frame_id ped_id x y records");
  replay->add_flag("--dry-run", o.flags.dry_run, "List partial runs only");

  auto* simulate = app.add_subcommand("simulate", "Closed-loop runs among social-force pedestrians");
  add_common(simulate, o);
  add_thresholds(simulate, o);
  simulate->add_option("--pedestrians", o.pedestrians, "Pedestrians in the arena");
  simulate->add_option("--runs", o.runs, "Number of seeded runs");

  auto* metrics = app.add_subcommand("metrics", "Recompute a report from saved run logs");
  add_common(metrics, o);
  add_thresholds(metrics, o);
  metrics->add_option("logs", o.logs, "Run log CSVs or directories")->required();

  auto* print = app.add_subcommand("print-config", "Print the effective configuration as JSON");
  add_common(print, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (evolve->parsed()) {
      cli::cmd_evolve1d(build_config(Command::Evolve1d, o), std::cout);
    } else if (replay->parsed()) {
      cli::cmd_replay(build_config(Command::Replay, o), o.flags, std::cout);
    } else if (simulate->parsed()) {
      cli::cmd_simulate(build_config(Command::Simulate, o), o.flags, std::cout);
    } else if (metrics->parsed()) {
      std::vector<std::filesystem::path> inputs(o.logs.begin(), o.logs.end());
      cli::cmd_metrics(build_config(Command::Metrics, o), inputs, o.flags, std::cout);
    } else if (print->parsed()) {
      ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
      std::cout << config_to_json(cfg).dump(2) << '\n';
    }
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

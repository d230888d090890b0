#pragma once

#include "distnav/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace distnav::cli {

struct RunFlags {
  /// Zero replan times in logs and drop them from reports.
  bool no_timing = false;
  bool dry_run = false;
};

struct Evolve1dResult {
  std::vector<double> objective;              // oracle J_c per sweep
  std::optional<std::vector<double>> ks;      // per agent, with --compare-sampler
};

/// Oracle evolution (and optionally the sampled engine) of the 1D scenario.
/// Writes evolution.csv, objective.csv and summary.json under cfg.output.
Evolve1dResult cmd_evolve1d(const ExperimentConfig& cfg, std::ostream& out);

/// Partial-trajectory benchmark over cfg.dataset. Writes runs/<name>.{csv,json},
/// report.{json,txt} and human_report.json. Nothing is run with dry_run.
std::optional<MetricsReport> cmd_replay(const ExperimentConfig& cfg, const RunFlags& flags, std::ostream& out);

/// cfg.runs arena runs with seeds cfg.seed, cfg.seed + 1, ...
MetricsReport cmd_simulate(const ExperimentConfig& cfg, const RunFlags& flags, std::ostream& out);

/// Report recomputed from saved run logs (files or directories of them).
MetricsReport cmd_metrics(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& inputs,
                          const RunFlags& flags, std::ostream& out);

}  // namespace distnav::cli

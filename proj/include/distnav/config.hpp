#pragma once

#include "distnav/grid_oracle.hpp"
#include "distnav/metrics.hpp"
#include "distnav/simulator.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace distnav {

enum class Command { Evolve1d, Replay, Simulate, Metrics };

std::string_view command_name(Command c);

/// Everything an experiment needs, loadable from one JSON file.
/// Absent keys keep their defaults; unknown keys are errors.
struct ExperimentConfig {
  Command mode = Command::Replay;
  std::uint64_t seed = 1;
  /// Samples per agent (planner) and per agent of the 1D sampler comparison.
  std::size_t samples = 100;
  std::size_t jobs = 1;
  std::string verbosity = "info";

  std::string dataset;
  std::string output = "out";

  PlannerConfig planner;
  ArenaScenario arena;
  std::size_t runs = 20;
  ReplayOptions replay;
  Thresholds thresholds;

  Scenario1d evolve1d;
  bool compare_sampler = false;

  /// Throws InputError naming the offending field.
  void validate() const;
  /// Planner settings with `samples` and `seed` applied.
  PlannerConfig effective_planner() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

}  // namespace distnav

#pragma once

#include "distnav/simulator.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace distnav {

struct Thresholds {
  double collision_dist = 0.21;
  double discomfort_dist = 0.30;
  double freezing_ratio = 1.25;

  void validate() const;
};

struct RunResult {
  std::string name;
  bool collision = false;
  bool discomfort = false;
  bool freezing = false;
  bool timeout = false;
  bool reached_goal = false;
  /// False when no pedestrian was ever present; then min_sep is empty and
  /// the separation flags are false.
  bool has_pedestrians = false;
  std::optional<double> min_sep;
  double robot_path = 0.0;  // d_r
  double ratio = 0.0;       // d_r / d_h
  double duration = 0.0;
  std::vector<double> replan_ms;
};

RunResult classify_run(const RunLog& log, double human_path_length, const Thresholds& th);
inline RunResult classify_run(const RunLog& log, const Thresholds& th) {
  return classify_run(log, log.human_path_length, th);
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

struct MetricsReport {
  std::size_t runs = 0;
  std::size_t collisions = 0;
  std::size_t discomforts = 0;
  std::size_t freezes = 0;
  std::size_t timeouts = 0;
  std::size_t goals_reached = 0;
  std::size_t runs_without_pedestrians = 0;
  double discomfort_pct = 0.0;
  double collision_pct = 0.0;
  double freezing_pct = 0.0;
  double max_ratio = 0.0;
  MeanSd min_sep;       // over runs with pedestrians
  MeanSd path_length;   // over all runs
  MeanSd time_to_goal;  // over runs that reached the goal
  MeanSd replan_ms;     // over every replan of every run
  Thresholds thresholds;
};

/// Population mean and sd; the result does not depend on the input order.
MeanSd mean_sd(std::vector<double> values);

/// Order-independent aggregate; throws PreconditionError on empty input.
MetricsReport aggregate(std::span<const RunResult> results, const Thresholds& th);

void write_report_json(std::ostream& os, const MetricsReport& report, bool timing = true);
/// Aligned text table with one header row and one value row.
void write_report_table(std::ostream& os, const MetricsReport& report, bool timing = true);

}  // namespace distnav

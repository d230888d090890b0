#pragma once

#include "distnav/collision.hpp"
#include "distnav/gp_preference.hpp"
#include "distnav/variational.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace distnav {

// ---------------------------------------------------------------------------
// World

enum class AgentKind { Robot, Sfm, Replay };

struct AgentState {
  int id = 0;
  Vec2 pos;
  Vec2 vel;
  Vec2 goal;
  AgentKind kind = AgentKind::Sfm;
};

/// Id used for the robot in logs.
inline constexpr int kRobotId = -1;

struct WorldState {
  double time = 0.0;
  std::vector<AgentState> agents;

  /// Throws PreconditionError on duplicate ids or non-finite states.
  void validate() const;
  const AgentState* find(int id) const;
  const AgentState* robot() const;
  /// Smallest robot-to-other distance; nullopt without other agents.
  std::optional<double> robot_min_separation() const;
};

struct SfmParams {
  double desired_speed = 1.3;
  double relaxation_time = 0.5;
  double repulsion_strength = 2.0;
  double repulsion_range = 0.3;
  double max_speed = 1.8;

  void validate() const;
};

/// Advances every Sfm agent by one symplectic-Euler step; other kinds are untouched.
///
/// Acceleration = (v_desired - v) / relaxation_time + sum_j A exp(-d_j / B) n_j
/// over all other agents (the robot included). v_desired points at the goal and
/// tapers linearly to zero within desired_speed * relaxation_time of it. When
/// the net repulsion is antiparallel to the desired direction, a 1e-3 m/s^2
/// push to the agent's right breaks the head-on deadlock symmetrically.
WorldState step_sfm(const WorldState& world, const SfmParams& params, double dt);

// ---------------------------------------------------------------------------
// Recorded pedestrians

struct Track {
  int id = 0;
  std::vector<std::size_t> frames;  // indices into Dataset::frame_ids, increasing
  std::vector<Vec2> positions;
};

struct Dataset {
  std::string name;
  double frame_period = 0.4;
  std::vector<long long> frame_ids;  // unique, increasing
  std::vector<Track> tracks;

  double time(std::size_t frame) const { return frame_period * static_cast<double>(frame); }
  const Track* track(int id) const;
  /// Positions of every pedestrian present at `frame` (except `exclude`).
  std::vector<std::pair<int, Vec2>> at_frame(std::size_t frame, std::optional<int> exclude = {}) const;
};

/// Parses `frame_id pedestrian_id x y` records (whitespace or comma separated,
/// '#' comments). Errors carry the line number of the first bad record.
Dataset parse_dataset(std::istream& in, const std::string& name, double frame_period = 0.4);
/// Reads a dataset file; `<path>.meta.json` may override frame_period.
Dataset load_dataset(const std::filesystem::path& path);

struct PartialRun {
  int pedestrian = 0;
  std::size_t start_frame = 0;  // index into frame_ids
  std::size_t end_frame = 0;
  std::vector<std::size_t> frames;
  std::vector<Vec2> human_path;

  double length() const;
};

inline constexpr double kPartialTarget = 10.0;
inline constexpr double kPartialMin = 8.0;
inline constexpr double kPartialMax = 12.0;

/// Consecutive ~10 m segments of every track, greedily from its start.
/// Neighbouring segments share their boundary sample.
std::vector<PartialRun> extract_partials(const Dataset& data);

// ---------------------------------------------------------------------------
// Planner

struct PlannerConfig {
  std::size_t horizon_steps = 20;
  double dt = 0.4;
  std::size_t samples = 100;
  KernelParams pedestrian_kernel{4.0, 0.5, 1e-6};
  KernelParams robot_kernel{4.0, 0.5, 1e-6};
  double observation_noise = 0.0025;
  double goal_noise = kDefaultGoalNoiseVar;
  /// Observations kept per agent.
  std::size_t history = 8;
  CollisionKernel collision{};
  SolverConfig solver{};
  /// At most this many pedestrians (highest interaction scores) join the solve.
  std::size_t max_critical = 6;
  double robot_speed = 1.3;
  double max_speed = 1.8;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Recent observations per agent id.
class ObservationHistory {
 public:
  explicit ObservationHistory(std::size_t capacity = 8) : capacity_(capacity) {}
  void record(int id, double t, Vec2 pos);
  void forget_missing(const std::vector<int>& present);
  const std::deque<Observation>* get(int id) const;

 private:
  std::size_t capacity_;
  std::map<int, std::deque<Observation>> data_;
};

struct PlanResult {
  /// Starts at the robot's current position, then the horizon grid.
  Trajectory robot;
  std::vector<int> pedestrian_ids;
  std::vector<Trajectory> predictions;  // per pedestrian_ids entry
  std::vector<int> critical_ids;
  SolveReport report;
};

/// splitmix64-style mix of (run seed, frame, agent id).
std::uint64_t sample_seed(std::uint64_t run_seed, std::uint64_t frame, int agent);

/// Fits GPs, samples, filters critical agents, solves and selects.
/// Engine failures are rethrown with the world time attached.
PlanResult replan(const WorldState& world, const ObservationHistory& history, const PlannerConfig& cfg,
                  std::uint64_t frame);

// ---------------------------------------------------------------------------
// Runs

struct StepRecord {
  double time = 0.0;
  std::vector<std::pair<int, Vec2>> positions;  // robot first
  std::optional<double> min_separation;
  /// Wall time of the replan issued at this step; empty when none ran.
  std::optional<double> replan_ms;
  Trajectory plan;
};

struct RunLog {
  std::string name;
  std::vector<StepRecord> steps;
  Vec2 start;
  Vec2 goal;
  bool reached_goal = false;
  bool timeout = false;
  /// Reference length d_h: the replaced pedestrian's recorded path (replay)
  /// or the straight start-goal distance (interactive).
  double human_path_length = 0.0;

  std::vector<Vec2> robot_path() const;
  /// Zeroes every replan_ms (for byte-comparable outputs).
  void strip_timing();
  std::optional<double> min_separation() const;
};

struct ReplayOptions {
  double goal_tolerance = 0.5;
  /// Extra frames beyond the human's duration, as a fraction of it.
  double grace = 0.25;
  bool record_plans = false;
};

RunLog run_replay(const Dataset& data, const PartialRun& partial, const PlannerConfig& cfg,
                  const ReplayOptions& opts = {});

/// Log of the removed pedestrian itself (its recorded path, same neighbours):
/// the human baseline of the benchmark.
RunLog human_baseline(const Dataset& data, const PartialRun& partial);

struct ArenaScenario {
  double radius = 4.0;
  std::size_t pedestrians = 5;
  double time_cap = 60.0;
  double goal_tolerance = 0.3;
  /// Minimum initial spacing between pedestrians.
  double spawn_spacing = 1.0;
  SfmParams sfm{};

  void validate() const;
};

/// Robot crosses the circle from (0, -r) to (0, r) among circulating Sfm
/// pedestrians that see the robot and get a new goal on arrival.
RunLog run_interactive(const ArenaScenario& scenario, const PlannerConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Log I/O

struct RunSummary {
  std::string name;
  std::size_t steps = 0;
  bool reached_goal = false;
  bool timeout = false;
  double human_path_length = 0.0;
  double robot_path_length = 0.0;
  std::optional<double> min_separation;
  double duration = 0.0;
  double mean_replan_ms = 0.0;
};

RunSummary summarize(const RunLog& log);

/// CSV rows `t,agent_id,x,y,min_sep,replan_ms`; doubles round-trip exactly
/// and an undefined min_sep is an empty field.
void write_run_csv(std::ostream& os, const RunLog& log);
void write_run_summary_json(std::ostream& os, const RunLog& log);
/// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`.
void save_run(const std::filesystem::path& dir, const RunLog& log);
/// Reads a CSV written by write_run_csv plus its sibling JSON summary.
RunLog load_run(const std::filesystem::path& csv_path);

}  // namespace distnav

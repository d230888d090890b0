#include "distnav/simulator.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace distnav {

namespace {

std::optional<double> min_distance(Vec2 robot, const std::vector<std::pair<int, Vec2>>& others) {
  std::optional<double> best;
  for (const auto& [id, pos] : others) {
    const double d = distance(robot, pos);
    if (!best || d < *best) best = d;
  }
  return best;
}

StepRecord make_step(double t, Vec2 robot, const std::vector<std::pair<int, Vec2>>& others) {
  StepRecord step;
  step.time = t;
  step.positions.reserve(others.size() + 1);
  step.positions.emplace_back(kRobotId, robot);
  step.positions.insert(step.positions.end(), others.begin(), others.end());
  step.min_separation = min_distance(robot, others);
  return step;
}

Vec2 limit_step(Vec2 from, Vec2 to, double max_len) {
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len <= max_len) return to;
  return from + (max_len / len) * d;
}

struct TimedPlan {
  PlanResult plan;
  double ms;
};

TimedPlan timed_replan(const WorldState& world, const ObservationHistory& history, const PlannerConfig& cfg,
                       std::uint64_t frame) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult plan = replan(world, history, cfg, frame);
  const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - t0;
  return {std::move(plan), ms.count()};
}

void check_partial(const Dataset& data, const PartialRun& partial) {
  const Track* track = data.track(partial.pedestrian);
  const auto mismatch = [&](const std::string& why) {
    return InputError(fmt::format("partial of pedestrian {} does not match dataset '{}': {}", partial.pedestrian,
                                  data.name, why));
  };
  if (!track) throw mismatch("unknown pedestrian");
  if (partial.frames.size() < 2 || partial.frames.size() != partial.human_path.size()) {
    throw mismatch("need >= 2 frames with one position each");
  }
  if (partial.frames.front() != partial.start_frame || partial.frames.back() != partial.end_frame) {
    throw mismatch("frame range inconsistent");
  }
  for (std::size_t k = 0; k < partial.frames.size(); ++k) {
    const auto it = std::lower_bound(track->frames.begin(), track->frames.end(), partial.frames[k]);
    if (it == track->frames.end() || *it != partial.frames[k] ||
        track->positions[static_cast<std::size_t>(it - track->frames.begin())] != partial.human_path[k]) {
      throw mismatch(fmt::format("frame index {} not in the recording", partial.frames[k]));
    }
  }
}

std::string partial_name(const Dataset& data, const PartialRun& partial, std::string_view prefix) {
  std::string stem = std::filesystem::path(data.name).stem().string();
  if (stem.empty()) stem = "dataset";
  return fmt::format("{}{}_ped{}_f{}", prefix, stem, partial.pedestrian, data.frame_ids[partial.start_frame]);
}

}  // namespace

std::vector<Vec2> RunLog::robot_path() const {
  std::vector<Vec2> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.positions.front().second);
  return out;
}

std::optional<double> RunLog::min_separation() const {
  std::optional<double> best;
  for (const auto& s : steps) {
    if (s.min_separation && (!best || *s.min_separation < *best)) best = s.min_separation;
  }
  return best;
}

void RunLog::strip_timing() {
  for (auto& s : steps) {
    if (s.replan_ms) s.replan_ms = 0.0;
  }
}

RunLog run_replay(const Dataset& data, const PartialRun& partial, const PlannerConfig& planner,
                  const ReplayOptions& opts) {
  check_partial(data, partial);
  PlannerConfig cfg = planner;
  cfg.dt = data.frame_period;
  cfg.validate();

  RunLog log;
  log.name = partial_name(data, partial, "");
  log.start = partial.human_path.front();
  log.goal = partial.human_path.back();
  log.human_path_length = partial.length();

  const std::size_t span = partial.end_frame - partial.start_frame;
  const auto grace = static_cast<std::size_t>(std::ceil(opts.grace * static_cast<double>(span)));
  const std::size_t last = std::min(partial.end_frame + grace, data.frame_ids.size() - 1);

  ObservationHistory history(cfg.history);
  const std::size_t warmup = std::min(partial.start_frame, cfg.history - 1);
  for (std::size_t f = partial.start_frame - warmup; f < partial.start_frame; ++f) {
    for (const auto& [id, pos] : data.at_frame(f, partial.pedestrian)) history.record(id, data.time(f), pos);
  }

  Vec2 robot = log.start;
  Vec2 robot_vel{};
  for (std::size_t f = partial.start_frame;; ++f) {
    const double t = data.time(f);
    const auto others = data.at_frame(f, partial.pedestrian);
    std::vector<int> present;
    for (const auto& [id, pos] : others) {
      history.record(id, t, pos);
      present.push_back(id);
    }
    history.forget_missing(present);

    StepRecord step = make_step(t, robot, others);
    if (distance(robot, log.goal) <= opts.goal_tolerance) {
      log.reached_goal = true;
      log.steps.push_back(std::move(step));
      break;
    }
    if (f >= last) {
      log.timeout = true;
      log.steps.push_back(std::move(step));
      break;
    }

    WorldState world;
    world.time = t;
    world.agents.push_back({kRobotId, robot, robot_vel, log.goal, AgentKind::Robot});
    for (const auto& [id, pos] : others) world.agents.push_back({id, pos, {}, pos, AgentKind::Replay});
    auto [plan, ms] = timed_replan(world, history, cfg, f);
    step.replan_ms = ms;
    const Vec2 next = limit_step(robot, plan.robot[1], cfg.max_speed * cfg.dt);
    if (opts.record_plans) step.plan = std::move(plan.robot);
    log.steps.push_back(std::move(step));
    robot_vel = (1.0 / cfg.dt) * (next - robot);
    robot = next;
  }
  spdlog::debug("{}: {} steps, {}", log.name, log.steps.size(),
                log.reached_goal ? "reached goal" : "timed out");
  return log;
}

RunLog human_baseline(const Dataset& data, const PartialRun& partial) {
  check_partial(data, partial);
  RunLog log;
  log.name = partial_name(data, partial, "human_");
  log.start = partial.human_path.front();
  log.goal = partial.human_path.back();
  log.human_path_length = partial.length();
  log.reached_goal = true;
  for (std::size_t k = 0; k < partial.frames.size(); ++k) {
    const std::size_t f = partial.frames[k];
    log.steps.push_back(make_step(data.time(f), partial.human_path[k], data.at_frame(f, partial.pedestrian)));
  }
  return log;
}

void ArenaScenario::validate() const {
  if (!(radius > 0.0)) throw PreconditionError("ArenaScenario: radius must be positive");
  if (!(time_cap > 0.0)) throw PreconditionError("ArenaScenario: time_cap must be positive");
  if (!(goal_tolerance > 0.0)) throw PreconditionError("ArenaScenario: goal_tolerance must be positive");
  if (!(spawn_spacing >= 0.0)) throw PreconditionError("ArenaScenario: spawn_spacing must be >= 0");
  if (pedestrians > 64) throw PreconditionError("ArenaScenario: at most 64 pedestrians");
  sfm.validate();
}

RunLog run_interactive(const ArenaScenario& scenario, const PlannerConfig& planner, std::uint64_t seed) {
  scenario.validate();
  PlannerConfig cfg = planner;
  cfg.seed = seed;
  cfg.validate();

  const double r = scenario.radius;
  // Arena layout has its own stream, disjoint from the per-frame sampling seeds.
  std::mt19937_64 rng(sample_seed(seed, std::numeric_limits<std::uint64_t>::max(), 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto on_circle = [&](Vec2 from) {
    // Far side of the arena so that pedestrians cross it.
    for (;;) {
      const double a = 2.0 * std::numbers::pi * unit(rng);
      const Vec2 g{r * std::cos(a), r * std::sin(a)};
      if (distance(g, from) >= r) return g;
    }
  };

  RunLog log;
  log.name = fmt::format("arena_n{}_seed{}", scenario.pedestrians, seed);
  log.start = {0.0, -r};
  log.goal = {0.0, r};
  log.human_path_length = distance(log.start, log.goal);

  WorldState world;
  world.agents.push_back({kRobotId, log.start, {}, log.goal, AgentKind::Robot});
  for (std::size_t i = 0; i < scenario.pedestrians; ++i) {
    Vec2 pos;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000) throw PreconditionError("ArenaScenario: cannot place pedestrians with this spacing");
      const double rho = (r - 0.5) * std::sqrt(unit(rng));
      const double a = 2.0 * std::numbers::pi * unit(rng);
      pos = {rho * std::cos(a), rho * std::sin(a)};
      const bool clear = std::all_of(world.agents.begin(), world.agents.end(), [&](const AgentState& o) {
        return distance(o.pos, pos) >= scenario.spawn_spacing;
      }) && distance(pos, log.goal) >= scenario.spawn_spacing;
      if (clear) break;
    }
    world.agents.push_back({static_cast<int>(i), pos, {}, on_circle(pos), AgentKind::Sfm});
  }

  ObservationHistory history(cfg.history);
  constexpr int kSubsteps = 4;
  for (std::uint64_t frame = 0;; ++frame) {
    world.time = cfg.dt * static_cast<double>(frame);
    std::vector<std::pair<int, Vec2>> others;
    for (const auto& a : world.agents) {
      if (a.kind == AgentKind::Robot) continue;
      others.emplace_back(a.id, a.pos);
      history.record(a.id, world.time, a.pos);
    }

    AgentState& robot = world.agents.front();
    StepRecord step = make_step(world.time, robot.pos, others);
    if (distance(robot.pos, log.goal) <= scenario.goal_tolerance) {
      log.reached_goal = true;
      log.steps.push_back(std::move(step));
      break;
    }
    if (world.time >= scenario.time_cap) {
      log.timeout = true;
      log.steps.push_back(std::move(step));
      break;
    }

    auto [plan, ms] = timed_replan(world, history, cfg, frame);
    step.replan_ms = ms;
    const Vec2 next = limit_step(robot.pos, plan.robot[1], cfg.max_speed * cfg.dt);
    log.steps.push_back(std::move(step));
    robot.vel = (1.0 / cfg.dt) * (next - robot.pos);
    robot.pos = next;

    const double h = cfg.dt / kSubsteps;
    for (int k = 0; k < kSubsteps; ++k) world = step_sfm(world, scenario.sfm, h);
    for (auto& a : world.agents) {
      // New goal on arrival; the desired speed tapers, so use a looser radius.
      if (a.kind == AgentKind::Sfm && distance(a.pos, a.goal) <= 0.5) a.goal = on_circle(a.pos);
    }
  }
  return log;
}

}  // namespace distnav

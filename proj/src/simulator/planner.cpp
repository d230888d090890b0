#include "distnav/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace distnav {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Rethrows engine failures with the world time attached, keeping the type.
template <class F>
auto with_context(double time, F&& f) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(fmt::format("replan at t={:.3f}s: {}", time, e.what()));
  } catch (const PreconditionError& e) {
    throw PreconditionError(fmt::format("replan at t={:.3f}s: {}", time, e.what()));
  }
}

}  // namespace

void PlannerConfig::validate() const {
  if (horizon_steps < 1) throw PreconditionError("PlannerConfig: horizon_steps must be >= 1");
  if (!(dt > 0.0)) throw PreconditionError("PlannerConfig: dt must be positive");
  if (samples < 1) throw PreconditionError("PlannerConfig: samples must be >= 1");
  if (history < 1) throw PreconditionError("PlannerConfig: history must be >= 1");
  if (!(observation_noise >= 0.0)) throw PreconditionError("PlannerConfig: observation_noise must be >= 0");
  if (!(goal_noise > 0.0)) throw PreconditionError("PlannerConfig: goal_noise must be positive");
  if (!(robot_speed > 0.0) || !(max_speed >= robot_speed)) {
    throw PreconditionError("PlannerConfig: need 0 < robot_speed <= max_speed");
  }
  pedestrian_kernel.validate();
  robot_kernel.validate();
  collision.validate();
  solver.validate();
}

void ObservationHistory::record(int id, double t, Vec2 pos) {
  auto& q = data_[id];
  if (!q.empty() && q.back().t >= t) throw PreconditionError("ObservationHistory: times must increase");
  q.push_back({t, pos, 0.0});
  while (q.size() > capacity_) q.pop_front();
}

void ObservationHistory::forget_missing(const std::vector<int>& present) {
  std::erase_if(data_, [&](const auto& kv) {
    return std::find(present.begin(), present.end(), kv.first) == present.end();
  });
}

const std::deque<Observation>* ObservationHistory::get(int id) const {
  const auto it = data_.find(id);
  return it == data_.end() ? nullptr : &it->second;
}

std::uint64_t sample_seed(std::uint64_t run_seed, std::uint64_t frame, int agent) {
  std::uint64_t h = splitmix64(run_seed);
  h = splitmix64(h ^ frame);
  return splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(agent)));
}

PlanResult replan(const WorldState& world, const ObservationHistory& history, const PlannerConfig& cfg,
                  std::uint64_t frame) {
  cfg.validate();
  world.validate();
  const AgentState* robot = world.robot();
  if (!robot) throw PreconditionError("replan: world has no robot");

  return with_context(world.time, [&] {
    const TimeGrid grid(world.time + cfg.dt, cfg.dt, cfg.horizon_steps);

    // Robot: current position plus the goal as an artificial observation,
    // reached at the nominal speed.
    const double to_goal = distance(robot->pos, robot->goal);
    const double goal_time = world.time + std::max(to_goal / cfg.robot_speed, cfg.dt);
    const auto robot_obs = augment_with_goal({{world.time, robot->pos, cfg.observation_noise}}, robot->goal,
                                             goal_time, {}, cfg.goal_noise);
    PreferenceGP robot_gp = fit_preference(robot_obs, grid, cfg.robot_kernel, PriorMean::Interpolant);

    // Pedestrians: recent track, constant-velocity prior, no goal.
    std::vector<const AgentState*> peds;
    for (const auto& a : world.agents) {
      if (&a != robot) peds.push_back(&a);
    }
    std::sort(peds.begin(), peds.end(), [](const AgentState* a, const AgentState* b) { return a->id < b->id; });

    std::vector<PreferenceGP> ped_gps;
    std::vector<SampleSet> ped_sets;
    for (const AgentState* p : peds) {
      std::vector<Observation> obs;
      if (const auto* h = history.get(p->id)) {
        for (const auto& o : *h) {
          if (o.t < world.time) obs.push_back({o.t, o.pos, cfg.observation_noise});
        }
      }
      obs.push_back({world.time, p->pos, cfg.observation_noise});
      ped_gps.push_back(fit_preference(obs, grid, cfg.pedestrian_kernel, PriorMean::Linear));
      ped_sets.push_back(sample_trajectories(ped_gps.back(), cfg.samples, sample_seed(cfg.seed, frame, p->id), p->id));
    }

    // Critical agents against the robot's intent, capped at the strongest few.
    std::vector<double> scores{0.0};
    const auto ped_scores = interaction_scores(robot_gp.mean_trajectory(), ped_sets, cfg.collision);
    scores.insert(scores.end(), ped_scores.begin(), ped_scores.end());
    auto kept = select_critical(scores, cfg.solver.critical_threshold, 0);
    kept.erase(std::remove(kept.begin(), kept.end(), std::size_t{0}), kept.end());
    const auto stronger = [&](std::size_t a, std::size_t b) {
      return scores[a] != scores[b] ? scores[a] > scores[b] : peds[a - 1]->id < peds[b - 1]->id;
    };
    std::sort(kept.begin(), kept.end(), stronger);
    if (kept.size() > cfg.max_critical) kept.resize(cfg.max_critical);
    std::reverse(kept.begin(), kept.end());  // weakest first, after the robot

    std::vector<SampleSet> sets;
    std::vector<PreferenceGP> gps;
    sets.push_back(sample_trajectories(robot_gp, cfg.samples, sample_seed(cfg.seed, frame, robot->id), robot->id));
    gps.push_back(robot_gp);
    PlanResult result;
    for (std::size_t k : kept) {
      sets.push_back(ped_sets[k - 1]);
      gps.push_back(ped_gps[k - 1]);
      result.critical_ids.push_back(peds[k - 1]->id);
    }

    if (sets.size() > 1) {
      SolverConfig solver = cfg.solver;
      solver.order.clear();
      result.report = solve(sets, cfg.collision, solver);
    } else {
      // Nobody to interact with: the prior stands.
      result.report.terminated_by = Termination::ObjectiveThreshold;
    }
    const auto chosen = select_optimal(sets, gps);

    std::vector<Vec2> states{robot->pos};
    states.insert(states.end(), chosen[0].states.begin(), chosen[0].states.end());
    result.robot = Trajectory(TimeGrid(world.time, cfg.dt, cfg.horizon_steps + 1), std::move(states));

    for (std::size_t p = 0; p < peds.size(); ++p) {
      result.pedestrian_ids.push_back(peds[p]->id);
      const auto it = std::find(kept.begin(), kept.end(), p + 1);
      result.predictions.push_back(it == kept.end() ? ped_gps[p].mean_trajectory()
                                                    : chosen[static_cast<std::size_t>(it - kept.begin()) + 1]);
    }
    return result;
  });
}

}  // namespace distnav

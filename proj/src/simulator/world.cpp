#include "distnav/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace distnav {

namespace {

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Repulsions whose direction is within this angle of straight backwards get the tie-break.
constexpr double kAntiparallelTol = 1e-6;
constexpr double kTieBreak = 1e-3;

}  // namespace

void WorldState::validate() const {
  if (!std::isfinite(time)) throw PreconditionError("WorldState: time must be finite");
  std::set<int> ids;
  for (const auto& a : agents) {
    if (!ids.insert(a.id).second) throw PreconditionError(fmt::format("WorldState: duplicate agent id {}", a.id));
    if (!finite(a.pos) || !finite(a.vel) || !finite(a.goal)) {
      throw PreconditionError(fmt::format("WorldState: agent {} has a non-finite state", a.id));
    }
  }
}

const AgentState* WorldState::find(int id) const {
  const auto it = std::find_if(agents.begin(), agents.end(), [id](const AgentState& a) { return a.id == id; });
  return it == agents.end() ? nullptr : &*it;
}

const AgentState* WorldState::robot() const {
  const auto it =
      std::find_if(agents.begin(), agents.end(), [](const AgentState& a) { return a.kind == AgentKind::Robot; });
  return it == agents.end() ? nullptr : &*it;
}

std::optional<double> WorldState::robot_min_separation() const {
  const AgentState* r = robot();
  if (!r) return std::nullopt;
  std::optional<double> best;
  for (const auto& a : agents) {
    if (&a == r) continue;
    const double d = distance(a.pos, r->pos);
    if (!best || d < *best) best = d;
  }
  return best;
}

void SfmParams::validate() const {
  if (!(desired_speed > 0.0 && relaxation_time > 0.0 && repulsion_strength > 0.0 && repulsion_range > 0.0 &&
        max_speed > 0.0)) {
    throw PreconditionError("SfmParams: all parameters must be positive");
  }
  if (max_speed < desired_speed) throw PreconditionError("SfmParams: max_speed must be >= desired_speed");
}

WorldState step_sfm(const WorldState& world, const SfmParams& params, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("step_sfm: dt must be positive");
  params.validate();

  WorldState next = world;
  next.time = world.time + dt;
  const auto& agents = world.agents;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentState& a = agents[i];
    if (a.kind != AgentKind::Sfm) continue;

    const Vec2 to_goal = a.goal - a.pos;
    const double dist = to_goal.norm();
    Vec2 heading{};
    Vec2 desired{};
    if (dist > 1e-12) {
      heading = (1.0 / dist) * to_goal;
      const double taper = std::min(1.0, dist / (params.desired_speed * params.relaxation_time));
      desired = (params.desired_speed * taper) * heading;
    }

    Vec2 repulsion{};
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (j == i) continue;
      const Vec2 away = a.pos - agents[j].pos;
      const double d = away.norm();
      if (d < 1e-12) continue;  // coincident: no defined direction
      repulsion += (params.repulsion_strength * std::exp(-d / params.repulsion_range) / d) * away;
    }

    Vec2 accel = (1.0 / params.relaxation_time) * (desired - a.vel) + repulsion;
    const double rep = repulsion.norm();
    if (rep > 0.0 && dist > 1e-12) {
      const double cos_angle = -(repulsion.x * heading.x + repulsion.y * heading.y) / rep;
      if (cos_angle >= std::cos(kAntiparallelTol)) accel += kTieBreak * Vec2{heading.y, -heading.x};
    }

    Vec2 vel = a.vel + dt * accel;
    const double speed = vel.norm();
    if (speed > params.max_speed) vel = (params.max_speed / speed) * vel;
    next.agents[i].vel = vel;
    next.agents[i].pos = a.pos + dt * vel;
  }
  return next;
}

}  // namespace distnav

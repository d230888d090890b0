#include "distnav/common.hpp"

#include <fmt/format.h>

namespace distnav {

TimeGrid::TimeGrid(double start, double step, std::size_t count) : t0(start), dt(step), steps(count) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw PreconditionError(fmt::format("TimeGrid: dt must be positive, got {}", dt));
  }
  if (steps < 1) {
    throw PreconditionError("TimeGrid: at least one step required");
  }
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(steps);
  for (std::size_t k = 0; k < steps; ++k) out[k] = time(k);
  return out;
}

Trajectory::Trajectory(TimeGrid g, std::vector<Vec2> s) : grid(g), states(std::move(s)) {
  if (states.size() != grid.steps) {
    throw PreconditionError(
        fmt::format("Trajectory: {} states for a grid of {} steps", states.size(), grid.steps));
  }
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) {
    throw PreconditionError(fmt::format("{}: time grid mismatch (t0 {} vs {}, dt {} vs {}, T {} vs {})",
                                        what, a.t0, b.t0, a.dt, b.dt, a.steps, b.steps));
  }
}

double path_arc_length(const std::vector<Vec2>& positions) {
  double total = 0.0;
  for (std::size_t k = 1; k < positions.size(); ++k) total += distance(positions[k - 1], positions[k]);
  return total;
}

}  // namespace distnav

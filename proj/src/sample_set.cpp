#include "distnav/sample_set.hpp"

#include <fmt/format.h>

#include <numeric>

namespace distnav {

void PathStore::gather(std::size_t j, double* xs, double* ys) const {
  for (std::size_t t = 0; t < grid.steps; ++t) {
    xs[t] = x[t * count + j];
    ys[t] = y[t * count + j];
  }
}

namespace {

std::shared_ptr<const PathStore> pack(const TimeGrid& grid, std::span<const Trajectory> paths) {
  if (paths.empty()) throw PreconditionError("SampleSet: at least one sample required");
  auto store = std::make_shared<PathStore>();
  store->grid = grid;
  store->count = paths.size();
  store->x.resize(grid.steps * paths.size());
  store->y.resize(grid.steps * paths.size());
  for (std::size_t j = 0; j < paths.size(); ++j) {
    require_same_grid(paths[j].grid, grid, "SampleSet");
    for (std::size_t t = 0; t < grid.steps; ++t) {
      const Vec2 p = paths[j].states[t];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw PreconditionError(fmt::format("SampleSet: non-finite state in sample {} at step {}", j, t));
      }
      store->x[t * paths.size() + j] = p.x;
      store->y[t * paths.size() + j] = p.y;
    }
  }
  return store;
}

}  // namespace

SampleSet::SampleSet(int agent, const TimeGrid& grid, std::span<const Trajectory> paths)
    : SampleSet(agent, pack(grid, paths)) {}

SampleSet::SampleSet(int agent, std::shared_ptr<const PathStore> paths)
    : agent_(agent), paths_(std::move(paths)) {
  if (!paths_ || paths_->count == 0) throw PreconditionError("SampleSet: at least one sample required");
  weights_.assign(paths_->count, 1.0);
}

SampleSet SampleSet::from_points(int agent, std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("SampleSet: at least one sample required");
  auto store = std::make_shared<PathStore>();
  store->grid = TimeGrid(0.0, 1.0, 1);
  store->count = xs.size();
  store->x.assign(xs.begin(), xs.end());
  store->y.assign(xs.size(), 0.0);
  return SampleSet(agent, std::move(store));
}

Trajectory SampleSet::trajectory(std::size_t j) const {
  std::vector<Vec2> states(grid().steps);
  for (std::size_t t = 0; t < states.size(); ++t) states[t] = paths_->state(j, t);
  return Trajectory(grid(), std::move(states));
}

void SampleSet::set_weights(std::vector<double> w) {
  if (w.size() != size()) {
    throw PreconditionError(fmt::format("SampleSet: {} weights for {} samples", w.size(), size()));
  }
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("SampleSet: weights must be finite and >= 0");
  }
  weights_ = std::move(w);
}

double SampleSet::mean_weight() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0) / static_cast<double>(weights_.size());
}

void SampleSet::normalize_weights() {
  const double mean = mean_weight();
  if (!(mean > 0.0)) throw NumericalError(fmt::format("SampleSet {}: all weights are zero", agent_));
  for (double& w : weights_) w /= mean;
}

}  // namespace distnav

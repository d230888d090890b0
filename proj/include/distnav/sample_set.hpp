#pragma once

#include "distnav/common.hpp"
#include "distnav/simd/kernels.hpp"

#include <memory>
#include <span>
#include <vector>

namespace distnav {

/// Immutable bundle of sample paths on one grid, packed time-major for the kernels.
struct PathStore {
  TimeGrid grid;
  std::size_t count = 0;
  std::vector<double> x;  // x[t * count + j]
  std::vector<double> y;

  simd::PathBlock block() const { return {x.data(), y.data(), count, grid.steps}; }
  Vec2 state(std::size_t j, std::size_t t) const { return {x[t * count + j], y[t * count + j]}; }
  /// Copies path j into xs/ys (grid.steps entries each).
  void gather(std::size_t j, double* xs, double* ys) const;
};

/// Fixed sample trajectories of one agent plus their (mutable) importance weights.
///
/// Trajectories never change after construction; only weights evolve during a
/// solve. Weights start at 1 and are kept at mean 1 by normalize_weights().
class SampleSet {
 public:
  SampleSet(int agent, const TimeGrid& grid, std::span<const Trajectory> paths);
  SampleSet(int agent, std::shared_ptr<const PathStore> paths);

  /// One-dimensional samples: a single time step with y = 0.
  static SampleSet from_points(int agent, std::span<const double> xs);

  int agent() const { return agent_; }
  const TimeGrid& grid() const { return paths_->grid; }
  std::size_t size() const { return paths_->count; }

  const PathStore& paths() const { return *paths_; }
  const std::shared_ptr<const PathStore>& shared_paths() const { return paths_; }
  Trajectory trajectory(std::size_t j) const;
  Vec2 state(std::size_t j, std::size_t t) const { return paths_->state(j, t); }

  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }
  void set_weights(std::vector<double> w);
  double mean_weight() const;
  /// Rescales so that mean(weights) == 1; throws NumericalError if all are zero.
  void normalize_weights();

 private:
  int agent_ = 0;
  std::shared_ptr<const PathStore> paths_;
  std::vector<double> weights_;
};

}  // namespace distnav

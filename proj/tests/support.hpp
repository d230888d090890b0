#pragma once

// Shared fixtures and hand-rolled generators for the test suites.

#include "distnav/collision.hpp"
#include "distnav/gp_preference.hpp"
#include "distnav/sample_set.hpp"
#include "distnav/variational.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace distnav::fixtures {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  std::mt19937_64& engine() { return rng_; }

  Trajectory trajectory(const TimeGrid& grid, double spread = 2.0) {
    std::vector<Vec2> s;
    for (std::size_t t = 0; t < grid.steps; ++t) s.push_back({normal(0.0, spread), normal(0.0, spread)});
    return Trajectory(grid, std::move(s));
  }

  /// Gaussian cloud of m paths around a random straight walk.
  SampleSet cloud(int agent, const TimeGrid& grid, std::size_t m) {
    const Vec2 start{uniform(-2, 2), uniform(-2, 2)};
    const Vec2 vel{uniform(-1, 1), uniform(-1, 1)};
    const double spread = uniform(0.1, 1.0);
    std::vector<Trajectory> paths;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<Vec2> s;
      for (std::size_t t = 0; t < grid.steps; ++t) {
        const double tt = grid.time(t);
        s.push_back({start.x + vel.x * tt + normal(0, spread), start.y + vel.y * tt + normal(0, spread)});
      }
      paths.emplace_back(grid, std::move(s));
    }
    return SampleSet(agent, grid, paths);
  }

  CollisionKernel kernel() { return {uniform(0.5, 20.0), uniform(0.2, 1.0), 2}; }

 private:
  std::mt19937_64 rng_;
};

/// Two agents with two samples each: psi(a1, b1) = 1, every other pair 0.
struct HandCase {
  std::vector<SampleSet> sets;
  PenaltyCache cache;

  HandCase()
      : sets{SampleSet::from_points(0, std::vector<double>{-1.0, 1.0}),
             SampleSet::from_points(1, std::vector<double>{-1.0, 1.0})},
        cache(PenaltyCache::from_matrices({2, 2}, {{0, 1, PenaltyMatrix(2, 2, {1.0, 0.0, 0.0, 0.0})}})) {}
};

/// One-step, unit-variance preference centred at the origin (both samples of the
/// hand case then have equal prior density).
inline PreferenceGP unit_gp_1step() {
  PreferenceGP gp;
  gp.grid = TimeGrid(0.0, 1.0, 1);
  gp.mean_x = Eigen::VectorXd::Zero(1);
  gp.mean_y = Eigen::VectorXd::Zero(1);
  gp.cov_x = Eigen::MatrixXd::Identity(1, 1);
  gp.cov_y = Eigen::MatrixXd::Identity(1, 1);
  return gp;
}

}  // namespace distnav::fixtures

#pragma once

#include "distnav/common.hpp"
#include "distnav/sample_set.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace distnav {

struct Observation {
  double t = 0.0;
  Vec2 pos;
  double noise_var = 0.0;
};

struct Waypoint {
  double t = 0.0;
  Vec2 pos;
};

/// Squared-exponential kernel k(t, t') = signal_var * exp(-(t - t')^2 / (2 length_scale^2)).
struct KernelParams {
  double length_scale = 4.0;
  double signal_var = 1.0;
  double jitter = 1e-6;

  void validate() const;
  double operator()(double a, double b) const;
};

/// Prior mean function of each axis.
enum class PriorMean {
  Constant,     // mean of the observed values
  Linear,       // least-squares line through the observations (constant velocity)
  Interpolant,  // piecewise-linear through the observations, held flat outside their span
};

/// Independent per-axis Gaussian over an agent's positions on a time grid.
/// The mean is the agent's intent, the covariance its flexibility.
struct PreferenceGP {
  TimeGrid grid;
  Eigen::VectorXd mean_x;
  Eigen::VectorXd mean_y;
  Eigen::MatrixXd cov_x;
  Eigen::MatrixXd cov_y;
  /// Diagonal jitter already folded into cov_x / cov_y.
  double jitter = 0.0;

  Trajectory mean_trajectory() const;
};

inline constexpr double kDefaultGoalNoiseVar = 0.01;

/// Appends the goal (and waypoints) as artificial observations and sorts by time.
std::vector<Observation> augment_with_goal(std::vector<Observation> obs, Vec2 goal, double goal_time,
                                           std::span<const Waypoint> waypoints = {},
                                           double artificial_noise_var = kDefaultGoalNoiseVar);

/// GP regression posterior over `grid` given the observations.
PreferenceGP fit_preference(std::span<const Observation> obs, const TimeGrid& grid, const KernelParams& kp,
                            PriorMean prior = PriorMean::Linear);

/// Draws m trajectories (all weights 1); deterministic in (gp, m, seed).
SampleSet sample_trajectories(const PreferenceGP& gp, std::size_t m, std::uint64_t seed, int agent = 0);

/// Precomputed factorisation for repeated log-density evaluations.
class GaussianLogDensity {
 public:
  explicit GaussianLogDensity(const PreferenceGP& gp);
  double operator()(const Trajectory& f) const;
  double operator()(const PathStore& paths, std::size_t j) const;
  /// log density at the mean.
  double log_normalizer() const { return log_norm_; }

 private:
  double axis_quadratic(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& diff) const;

  TimeGrid grid_;
  Eigen::VectorXd mean_x_, mean_y_;
  Eigen::LLT<Eigen::MatrixXd> llt_x_, llt_y_;
  double log_norm_ = 0.0;
};

double log_density(const PreferenceGP& gp, const Trajectory& f);

struct Moments1d {
  double mean = 0.0;
  double variance = 0.0;
  double skew = 0.0;
  double excess_kurtosis = 0.0;
  /// Locations of the local maxima (the intents).
  std::vector<double> modes;
};

/// Central moments and modes of a density sampled on a uniform grid.
Moments1d moments_1d(std::span<const double> xs, std::span<const double> ps);

/// Indices of interior local maxima whose value is at least rel_floor * max(ps).
std::vector<std::size_t> local_maxima(std::span<const double> ps, double rel_floor = 0.0);

/// Trapezoid integral on a uniform grid of spacing h.
double trapezoid(std::span<const double> ys, double h);

}  // namespace distnav

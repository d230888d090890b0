#include "distnav/gp_preference.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace distnav;

TEST(AugmentWithGoal, AppendsGoalLast) {
  const std::vector<Observation> obs{{0.0, {0, 0}, 0.0}, {0.4, {0.5, 0}, 0.0}};
  const auto out = augment_with_goal(obs, {5, 0}, 8.0);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out.back().t, 8.0);
  EXPECT_EQ(out.back().pos, (Vec2{5, 0}));
  EXPECT_EQ(out.back().noise_var, kDefaultGoalNoiseVar);
}

TEST(AugmentWithGoal, WaypointsAreSortedIn) {
  const std::vector<Observation> obs{{0.0, {0, 0}, 0.0}};
  const std::vector<Waypoint> wps{{3.0, {1, 1}}, {1.0, {2, 2}}};
  const auto out = augment_with_goal(obs, {5, 0}, 8.0, wps, 0.05);
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t k = 1; k < out.size(); ++k) EXPECT_LT(out[k - 1].t, out[k].t);
  EXPECT_EQ(out[1].noise_var, 0.05);
}

TEST(AugmentWithGoal, GoalBeforeLastObservationThrows) {
  const std::vector<Observation> obs{{0.0, {0, 0}, 0.0}, {0.4, {0.5, 0}, 0.0}};
  EXPECT_THROW(augment_with_goal(obs, {5, 0}, 0.2), PreconditionError);
}

TEST(FitPreference, SingleNoiselessObservationIsInterpolated) {
  const TimeGrid grid(0.0, 0.4, 10);
  const std::vector<Observation> obs{{1.2, {3.0, -2.0}, 0.0}};
  const auto gp = fit_preference(obs, grid, {4.0, 1.0, 1e-9}, PriorMean::Constant);
  EXPECT_NEAR(gp.mean_x(3), 3.0, 1e-6);
  EXPECT_NEAR(gp.mean_y(3), -2.0, 1e-6);
}

TEST(FitPreference, TwoPointPosteriorMatchesClosedForm) {
  // Constant prior c = mean of the observations, so the posterior mean is
  // c + k_t^T (K + (s + j) I)^{-1} (z - c); evaluated with the explicit 2x2 inverse.
  const KernelParams kp{50.0, 1.0, 1e-9};
  const double s = 1e-4;
  const double t0 = 0.0, t1 = 4.0, tm = 2.0;
  const double z0 = 0.0, z1 = 4.0, c = 2.0;
  const double a = kp(t0, t0) + s + kp.jitter, b = kp(t0, t1), d = kp(t1, t1) + s + kp.jitter;
  const double det = a * d - b * b;
  const double r0 = z0 - c, r1 = z1 - c;
  const double expected = c + kp(tm, t0) * (d * r0 - b * r1) / det + kp(tm, t1) * (-b * r0 + a * r1) / det;

  const std::vector<Observation> obs{{t0, {z0, 0}, s}, {t1, {z1, 0}, s}};
  const auto gp = fit_preference(obs, TimeGrid(tm, 1.0, 1), kp, PriorMean::Constant);
  EXPECT_NEAR(gp.mean_x(0), expected, 1e-9);
  // Length scale far beyond the gap: the midpoint stays on the straight line.
  EXPECT_NEAR(gp.mean_x(0), 2.0, 0.05);
}

TEST(FitPreference, NoObservationsThrows) {
  EXPECT_THROW(fit_preference({}, TimeGrid(0, 0.4, 5), {}), PreconditionError);
}

TEST(FitPreference, PosteriorVarianceNeverExceedsPrior) {
  fixtures::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const KernelParams kp{gen.uniform(0.5, 8.0), gen.uniform(0.1, 3.0), 1e-6};
    std::vector<Observation> obs;
    const std::size_t n = gen.index(1, 6);
    for (std::size_t k = 0; k < n; ++k) {
      obs.push_back({-0.4 * static_cast<double>(n - k), {gen.normal(), gen.normal()}, gen.uniform(0.0, 0.1)});
    }
    const TimeGrid grid(0.0, 0.4, 20);
    for (auto prior : {PriorMean::Constant, PriorMean::Linear, PriorMean::Interpolant}) {
      const auto gp = fit_preference(obs, grid, kp, prior);
      for (Eigen::Index t = 0; t < gp.cov_x.rows(); ++t) {
        EXPECT_LE(gp.cov_x(t, t), kp.signal_var + gp.jitter + 1e-9);
        EXPECT_LE(gp.cov_y(t, t), kp.signal_var + gp.jitter + 1e-9);
      }
      EXPECT_LE((gp.cov_x - gp.cov_x.transpose()).cwiseAbs().maxCoeff(), 1e-9 * gp.cov_x.cwiseAbs().maxCoeff());
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gp.cov_x);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9 * gp.cov_x.trace());
    }
  }
}

TEST(FitPreference, LinearPriorExtrapolatesConstantVelocity) {
  std::vector<Observation> obs;
  for (int k = 0; k < 5; ++k) obs.push_back({0.4 * k, {1.0 * 0.4 * k, 2.0}, 1e-6});
  const auto gp = fit_preference(obs, TimeGrid(2.0, 0.4, 20), {4.0, 0.5, 1e-6}, PriorMean::Linear);
  for (Eigen::Index t = 0; t < 20; ++t) {
    EXPECT_NEAR(gp.mean_x(t), 2.0 + 0.4 * static_cast<double>(t), 1e-3);
    EXPECT_NEAR(gp.mean_y(t), 2.0, 1e-3);
  }
}

TEST(SampleTrajectories, DegenerateCovarianceGivesTheMean) {
  PreferenceGP gp = fixtures::unit_gp_1step();
  gp.mean_x(0) = 1.25;
  gp.mean_y(0) = -0.5;
  gp.cov_x.setZero();
  gp.cov_y.setZero();
  const auto s = sample_trajectories(gp, 1, 7);
  EXPECT_EQ(s.state(0, 0), (Vec2{1.25, -0.5}));
  EXPECT_EQ(s.weights()[0], 1.0);
}

TEST(SampleTrajectories, SameSeedIsBitIdentical) {
  const auto gp = fit_preference(std::vector<Observation>{{0.0, {0, 0}, 0.01}}, TimeGrid(0.4, 0.4, 20), {4.0, 1.0, 1e-6});
  const auto a = sample_trajectories(gp, 50, 99);
  const auto b = sample_trajectories(gp, 50, 99);
  EXPECT_EQ(a.paths().x, b.paths().x);
  EXPECT_EQ(a.paths().y, b.paths().y);
  const auto c = sample_trajectories(gp, 50, 100);
  EXPECT_NE(a.paths().x, c.paths().x);
}

TEST(SampleTrajectories, EmpiricalMomentsConverge) {
  const auto gp = fit_preference(std::vector<Observation>{{0.0, {1, 2}, 0.01}, {0.8, {2, 2}, 0.01}}, TimeGrid(1.2, 0.4, 12),
                                 {3.0, 1.0, 1e-6}, PriorMean::Linear);
  const std::size_t m = 20000;
  const auto s = sample_trajectories(gp, m, 5);
  for (std::size_t t = 0; t < gp.grid.steps; ++t) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += s.state(j, t).x;
    const double mean = sum / m;
    for (std::size_t j = 0; j < m; ++j) sq += (s.state(j, t).x - mean) * (s.state(j, t).x - mean);
    const double var = gp.cov_x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t));
    EXPECT_LT(std::abs(mean - gp.mean_x(static_cast<Eigen::Index>(t))), 3.0 * std::sqrt(var / m));
    EXPECT_NEAR(sq / m, var, 0.1 * var);
  }
}

TEST(SampleTrajectories, ZeroSamplesThrows) {
  EXPECT_THROW(sample_trajectories(fixtures::unit_gp_1step(), 0, 1), PreconditionError);
}

TEST(LogDensity, MaximalAtTheMean) {
  const auto gp = fit_preference(std::vector<Observation>{{0.0, {0, 0}, 0.01}}, TimeGrid(0.4, 0.4, 8), {4.0, 1.0, 1e-6});
  const GaussianLogDensity logp(gp);
  const double at_mean = logp(gp.mean_trajectory());
  EXPECT_NEAR(at_mean, logp.log_normalizer(), 1e-9);
  fixtures::Gen gen(1);
  for (int k = 0; k < 20; ++k) EXPECT_LT(logp(gen.trajectory(gp.grid, 0.3)), at_mean);
}

TEST(LogDensity, SymmetricAboutTheMean) {
  const auto gp = fit_preference(std::vector<Observation>{{0.0, {0, 0}, 0.01}}, TimeGrid(0.4, 0.4, 8), {4.0, 1.0, 1e-6});
  fixtures::Gen gen(2);
  const Trajectory mean = gp.mean_trajectory();
  std::vector<Vec2> plus, minus;
  for (std::size_t t = 0; t < mean.size(); ++t) {
    const Vec2 d{gen.normal(0, 0.2), gen.normal(0, 0.2)};
    plus.push_back(mean[t] + d);
    minus.push_back(mean[t] - d);
  }
  EXPECT_NEAR(log_density(gp, Trajectory(gp.grid, plus)), log_density(gp, Trajectory(gp.grid, minus)), 1e-9);
}

TEST(LogDensity, UnitOffsetDropsByHalf) {
  const auto gp = fixtures::unit_gp_1step();
  const double at_mean = log_density(gp, Trajectory(gp.grid, {{0, 0}}));
  EXPECT_DOUBLE_EQ(at_mean - log_density(gp, Trajectory(gp.grid, {{1, 0}})), 0.5);
}

TEST(LogDensity, GridMismatchThrows) {
  const auto gp = fixtures::unit_gp_1step();
  EXPECT_THROW(log_density(gp, Trajectory(TimeGrid(0.0, 0.5, 1), {{0, 0}})), PreconditionError);
}

namespace {

std::vector<double> density_on(const std::vector<double>& xs, auto f) {
  std::vector<double> ps;
  for (double x : xs) ps.push_back(f(x));
  const double z = trapezoid(ps, xs[1] - xs[0]);
  for (double& p : ps) p /= z;
  return ps;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return xs;
}

}  // namespace

TEST(Moments1d, StandardNormal) {
  const auto xs = linspace(-6, 6, 1201);
  const auto ps = density_on(xs, [](double x) { return std::exp(-0.5 * x * x); });
  const auto m = moments_1d(xs, ps);
  EXPECT_NEAR(m.mean, 0.0, 1e-9);
  EXPECT_NEAR(m.variance, 1.0, 1e-3);
  EXPECT_NEAR(m.skew, 0.0, 1e-3);
  EXPECT_NEAR(m.excess_kurtosis, 0.0, 1e-2);
  ASSERT_EQ(m.modes.size(), 1u);
  EXPECT_NEAR(m.modes[0], 0.0, 1e-9);
}

TEST(Moments1d, SymmetricBimodal) {
  const auto xs = linspace(-6, 6, 1201);
  const auto ps = density_on(xs, [](double x) {
    return std::exp(-0.5 * (x - 1.5) * (x - 1.5) / 0.25) + std::exp(-0.5 * (x + 1.5) * (x + 1.5) / 0.25);
  });
  const auto m = moments_1d(xs, ps);
  EXPECT_EQ(m.modes.size(), 2u);
  EXPECT_NEAR(m.skew, 0.0, 1e-9);
}

TEST(Moments1d, ExponentialLikeIsRightSkewed) {
  // Gamma(2, 1) shape: skew 2 / sqrt(2) analytically.
  const auto xs = linspace(0, 40, 8001);
  const auto ps = density_on(xs, [](double x) { return x * std::exp(-x); });
  const auto m = moments_1d(xs, ps);
  EXPECT_GT(m.skew, 0.0);
  EXPECT_NEAR(m.skew, std::sqrt(2.0), 1e-3);
}

TEST(Moments1d, UnnormalisedThrows) {
  const auto xs = linspace(-6, 6, 101);
  std::vector<double> ps(xs.size(), 1.0);
  EXPECT_THROW(moments_1d(xs, ps), PreconditionError);
}

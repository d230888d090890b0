#include "distnav/gp_preference.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace distnav {

void KernelParams::validate() const {
  if (!(length_scale > 0.0) || !(signal_var > 0.0) || !(jitter > 0.0)) {
    throw PreconditionError(fmt::format("KernelParams must be strictly positive (length_scale {}, signal_var {}, jitter {})",
                                        length_scale, signal_var, jitter));
  }
}

double KernelParams::operator()(double a, double b) const {
  const double d = a - b;
  return signal_var * std::exp(-(d * d) / (2.0 * length_scale * length_scale));
}

Trajectory PreferenceGP::mean_trajectory() const {
  std::vector<Vec2> states(grid.steps);
  for (std::size_t t = 0; t < grid.steps; ++t) states[t] = {mean_x(t), mean_y(t)};
  return Trajectory(grid, std::move(states));
}

std::vector<Observation> augment_with_goal(std::vector<Observation> obs, Vec2 goal, double goal_time,
                                           std::span<const Waypoint> waypoints, double artificial_noise_var) {
  if (!(artificial_noise_var >= 0.0)) throw PreconditionError("augment_with_goal: noise variance must be >= 0");
  for (const auto& o : obs) {
    if (!(goal_time > o.t)) {
      throw PreconditionError(fmt::format("augment_with_goal: goal time {} is not after observation at t={}", goal_time, o.t));
    }
  }
  for (const auto& w : waypoints) obs.push_back({w.t, w.pos, artificial_noise_var});
  obs.push_back({goal_time, goal, artificial_noise_var});
  std::stable_sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) { return a.t < b.t; });
  return obs;
}

namespace {

Eigen::VectorXd prior_mean(PriorMean kind, const std::vector<double>& ts, const Eigen::VectorXd& values,
                           const std::vector<double>& query) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(query.size()));
  switch (kind) {
    case PriorMean::Constant:
      out.setConstant(values.mean());
      break;
    case PriorMean::Linear: {
      double t_mean = 0.0;
      for (double t : ts) t_mean += t;
      t_mean /= static_cast<double>(n);
      const double v_mean = values.mean();
      double sxx = 0.0, sxy = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dt = ts[static_cast<std::size_t>(i)] - t_mean;
        sxx += dt * dt;
        sxy += dt * (values(i) - v_mean);
      }
      const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
      for (std::size_t k = 0; k < query.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = v_mean + slope * (query[k] - t_mean);
      }
      break;
    }
    case PriorMean::Interpolant:
      // ts is sorted by the caller.
      for (std::size_t k = 0; k < query.size(); ++k) {
        const double q = query[k];
        double v;
        if (q <= ts.front()) {
          v = values(0);
        } else if (q >= ts.back()) {
          v = values(n - 1);
        } else {
          const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), q) - ts.begin());
          const std::size_t lo = hi - 1;
          const double span = ts[hi] - ts[lo];
          const double u = span > 0.0 ? (q - ts[lo]) / span : 0.0;
          v = values(static_cast<Eigen::Index>(lo)) +
              u * (values(static_cast<Eigen::Index>(hi)) - values(static_cast<Eigen::Index>(lo)));
        }
        out(static_cast<Eigen::Index>(k)) = v;
      }
      break;
  }
  return out;
}

constexpr int kJitterEscalations = 3;

}  // namespace

PreferenceGP fit_preference(std::span<const Observation> obs_in, const TimeGrid& grid, const KernelParams& kp,
                            PriorMean prior) {
  kp.validate();
  if (obs_in.empty()) throw PreconditionError("fit_preference: at least one observation required");
  std::vector<Observation> obs(obs_in.begin(), obs_in.end());
  for (const auto& o : obs) {
    if (!std::isfinite(o.t) || !std::isfinite(o.pos.x) || !std::isfinite(o.pos.y)) {
      throw PreconditionError("fit_preference: observation times and positions must be finite");
    }
    if (!(o.noise_var >= 0.0)) throw PreconditionError("fit_preference: noise variance must be >= 0");
  }
  std::stable_sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) { return a.t < b.t; });

  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto T = static_cast<Eigen::Index>(grid.steps);
  const std::vector<double> gts = grid.times();
  std::vector<double> ots(obs.size());
  Eigen::VectorXd zx(n), zy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = obs[static_cast<std::size_t>(i)];
    ots[static_cast<std::size_t>(i)] = o.t;
    zx(i) = o.pos.x;
    zy(i) = o.pos.y;
  }

  Eigen::MatrixXd gram(n, n), cross(T, n), prior_cov(T, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = kp(ots[i], ots[j]);
    gram(i, i) += obs[static_cast<std::size_t>(i)].noise_var;
  }
  for (Eigen::Index a = 0; a < T; ++a) {
    for (Eigen::Index i = 0; i < n; ++i) cross(a, i) = kp(gts[a], ots[i]);
    for (Eigen::Index b = 0; b < T; ++b) prior_cov(a, b) = kp(gts[a], gts[b]);
  }

  double jitter = kp.jitter;
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (int attempt = 0; attempt <= kJitterEscalations; ++attempt) {
    llt.compute(gram + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
    if (attempt < kJitterEscalations) jitter *= 10.0;
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double cond = std::abs(ev.maxCoeff()) / std::max(std::abs(ev.minCoeff()), 1e-300);
    throw NumericalError(fmt::format("fit_preference: Gram matrix singular after jitter {:.1e} (condition estimate {:.3e})",
                                     jitter, cond));
  }

  PreferenceGP gp;
  gp.grid = grid;
  gp.jitter = jitter;
  gp.mean_x = prior_mean(prior, ots, zx, gts) + cross * llt.solve(zx - prior_mean(prior, ots, zx, ots));
  gp.mean_y = prior_mean(prior, ots, zy, gts) + cross * llt.solve(zy - prior_mean(prior, ots, zy, ots));

  const Eigen::MatrixXd v = llt.matrixL().solve(cross.transpose());
  Eigen::MatrixXd cov = prior_cov - v.transpose() * v;
  cov = 0.5 * (cov + cov.transpose()).eval();
  cov.diagonal().array() += jitter;
  gp.cov_x = cov;
  gp.cov_y = cov;
  return gp;
}

namespace {

// Returns S with S S^T = cov, tolerating positive semi-definite input.
Eigen::MatrixXd square_root(const Eigen::MatrixXd& cov, double base_jitter) {
  const auto T = cov.rows();
  const double tol = 1e-9 * std::max(cov.trace(), 1e-300);
  double extra = 0.0;
  for (int attempt = 0; attempt <= kJitterEscalations; ++attempt) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov + extra * Eigen::MatrixXd::Identity(T, T));
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd d = ldlt.vectorD();
      if (d.minCoeff() >= -tol) {
        d = d.cwiseMax(0.0).cwiseSqrt();
        const Eigen::MatrixXd lower = ldlt.matrixL();
        Eigen::MatrixXd s = lower * d.asDiagonal();
        return ldlt.transpositionsP().transpose() * s;
      }
    }
    extra = extra == 0.0 ? std::max(base_jitter, 1e-12) : extra * 10.0;
  }
  throw NumericalError(fmt::format("sample_trajectories: covariance factorisation failed after jitter {:.1e}", extra));
}

}  // namespace

SampleSet sample_trajectories(const PreferenceGP& gp, std::size_t m, std::uint64_t seed, int agent) {
  if (m < 1) throw PreconditionError("sample_trajectories: m must be >= 1");
  const auto T = static_cast<Eigen::Index>(gp.grid.steps);
  if (gp.mean_x.size() != T || gp.mean_y.size() != T || gp.cov_x.rows() != T || gp.cov_y.rows() != T) {
    throw PreconditionError("sample_trajectories: GP dimensions do not match its grid");
  }
  const Eigen::MatrixXd sx = square_root(gp.cov_x, gp.jitter);
  const Eigen::MatrixXd sy = square_root(gp.cov_y, gp.jitter);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto store = std::make_shared<PathStore>();
  store->grid = gp.grid;
  store->count = m;
  store->x.resize(static_cast<std::size_t>(T) * m);
  store->y.resize(static_cast<std::size_t>(T) * m);
  Eigen::VectorXd z(T);
  for (std::size_t j = 0; j < m; ++j) {
    for (Eigen::Index t = 0; t < T; ++t) z(t) = normal(rng);
    const Eigen::VectorXd px = gp.mean_x + sx * z;
    for (Eigen::Index t = 0; t < T; ++t) z(t) = normal(rng);
    const Eigen::VectorXd py = gp.mean_y + sy * z;
    for (Eigen::Index t = 0; t < T; ++t) {
      store->x[static_cast<std::size_t>(t) * m + j] = px(t);
      store->y[static_cast<std::size_t>(t) * m + j] = py(t);
    }
  }
  return SampleSet(agent, std::move(store));
}

GaussianLogDensity::GaussianLogDensity(const PreferenceGP& gp)
    : grid_(gp.grid), mean_x_(gp.mean_x), mean_y_(gp.mean_y), llt_x_(gp.cov_x), llt_y_(gp.cov_y) {
  if (llt_x_.info() != Eigen::Success || llt_y_.info() != Eigen::Success) {
    throw NumericalError("log_density: covariance is not positive definite");
  }
  const double T = static_cast<double>(grid_.steps);
  auto log_det = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  };
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  log_norm_ = -0.5 * (log_det(llt_x_) + T * log_2pi) - 0.5 * (log_det(llt_y_) + T * log_2pi);
}

double GaussianLogDensity::axis_quadratic(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& diff) const {
  return llt.matrixL().solve(diff).squaredNorm();
}

double GaussianLogDensity::operator()(const Trajectory& f) const {
  require_same_grid(f.grid, grid_, "log_density");
  const auto T = static_cast<Eigen::Index>(grid_.steps);
  Eigen::VectorXd dx(T), dy(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    dx(t) = f.states[static_cast<std::size_t>(t)].x - mean_x_(t);
    dy(t) = f.states[static_cast<std::size_t>(t)].y - mean_y_(t);
  }
  return log_norm_ - 0.5 * (axis_quadratic(llt_x_, dx) + axis_quadratic(llt_y_, dy));
}

double GaussianLogDensity::operator()(const PathStore& paths, std::size_t j) const {
  require_same_grid(paths.grid, grid_, "log_density");
  const auto T = static_cast<Eigen::Index>(grid_.steps);
  Eigen::VectorXd dx(T), dy(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec2 p = paths.state(j, static_cast<std::size_t>(t));
    dx(t) = p.x - mean_x_(t);
    dy(t) = p.y - mean_y_(t);
  }
  return log_norm_ - 0.5 * (axis_quadratic(llt_x_, dx) + axis_quadratic(llt_y_, dy));
}

double log_density(const PreferenceGP& gp, const Trajectory& f) {
  require_same_grid(f.grid, gp.grid, "log_density");
  return GaussianLogDensity(gp)(f);
}

double trapezoid(std::span<const double> ys, double h) {
  if (ys.size() < 2) return 0.0;
  double s = 0.5 * (ys.front() + ys.back());
  for (std::size_t i = 1; i + 1 < ys.size(); ++i) s += ys[i];
  return s * h;
}

std::vector<std::size_t> local_maxima(std::span<const double> ps, double rel_floor) {
  std::vector<std::size_t> out;
  if (ps.size() < 3) return out;
  const double floor = rel_floor * *std::max_element(ps.begin(), ps.end());
  std::size_t i = 1;
  while (i + 1 < ps.size()) {
    if (ps[i] > ps[i - 1]) {
      // Walk across a plateau of equal values; it is a maximum if it then drops.
      std::size_t j = i;
      while (j + 1 < ps.size() && ps[j + 1] == ps[i]) ++j;
      if (j + 1 < ps.size() && ps[j + 1] < ps[i] && ps[i] >= floor && ps[i] > 0.0) out.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

Moments1d moments_1d(std::span<const double> xs, std::span<const double> ps) {
  if (xs.size() != ps.size() || xs.size() < 3) throw PreconditionError("moments_1d: need matching grids of >= 3 points");
  for (double p : ps) {
    if (!(p >= 0.0)) throw PreconditionError("moments_1d: density must be non-negative");
  }
  const double h = xs[1] - xs[0];
  const double mass = trapezoid(ps, h);
  if (std::abs(mass - 1.0) > 1e-6) throw PreconditionError(fmt::format("moments_1d: density integrates to {}, not 1", mass));

  std::vector<double> f(xs.size());
  auto moment = [&](auto&& g) {
    for (std::size_t i = 0; i < xs.size(); ++i) f[i] = g(xs[i]) * ps[i];
    return trapezoid(f, h);
  };
  Moments1d m;
  m.mean = moment([](double x) { return x; });
  const double mu = m.mean;
  m.variance = moment([mu](double x) { return (x - mu) * (x - mu); });
  const double m3 = moment([mu](double x) { return std::pow(x - mu, 3); });
  const double m4 = moment([mu](double x) { return std::pow(x - mu, 4); });
  m.skew = m3 / std::pow(m.variance, 1.5);
  m.excess_kurtosis = m4 / (m.variance * m.variance) - 3.0;
  for (std::size_t i : local_maxima(ps, 1e-9)) m.modes.push_back(xs[i]);
  return m;
}

}  // namespace distnav

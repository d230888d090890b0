#include "distnav/variational.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace distnav {

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::ObjectiveThreshold:
      return "objective_threshold";
    case Termination::MaxSweeps:
      return "max_sweeps";
    case Termination::FixedPoint:
      return "fixed_point";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(epsilon >= 0.0)) throw PreconditionError("SolverConfig: epsilon must be >= 0");
  if (!(kl_epsilon >= 0.0)) throw PreconditionError("SolverConfig: kl_epsilon must be >= 0");
  if (max_sweeps < 1) throw PreconditionError("SolverConfig: max_sweeps must be >= 1");
  if (!(gamma_clamp > 0.0)) throw PreconditionError("SolverConfig: gamma_clamp must be positive");
}

// ---------------------------------------------------------------------------
// PenaltyCache

namespace {

// Single-step paths whose points all lie on one horizontal line y = c.
bool on_common_line(const PathStore& p, double& line) {
  if (p.grid.steps != 1) return false;
  for (double y : p.y) {
    if (y != p.y[0]) return false;
  }
  line = p.y[0];
  return true;
}

}  // namespace

PenaltyCache::PenaltyCache(std::span<const SampleSet> sets, const CollisionKernel& k, std::size_t dense_budget_bytes) {
  k.validate();
  const std::size_t n = sets.size();
  if (n == 0) throw PreconditionError("PenaltyCache: no sample sets");
  for (const auto& s : sets) require_same_grid(s.grid(), sets[0].grid(), "PenaltyCache");

  gaussian_ = k.gaussian();
  sigma_ = k.sigma;
  sizes_.resize(n);
  paths_.resize(n);
  rows_x_.resize(n);
  rows_y_.resize(n);
  const std::size_t T = sets[0].grid().steps;
  for (std::size_t i = 0; i < n; ++i) {
    sizes_[i] = sets[i].size();
    paths_[i] = sets[i].shared_paths();
    rows_x_[i].resize(sizes_[i] * T);
    rows_y_[i].resize(sizes_[i] * T);
    for (std::size_t y = 0; y < sizes_[i]; ++y) {
      paths_[i]->gather(y, rows_x_[i].data() + y * T, rows_y_[i].data() + y * T);
    }
  }

  std::vector<double> lines(n);
  bool collinear = true;
  for (std::size_t i = 0; i < n; ++i) collinear = collinear && on_common_line(*paths_[i], lines[i]);
  for (std::size_t i = 1; i < n && collinear; ++i) collinear = lines[i] == lines[0];

  pairs_.resize(n * n);
  transforms_.resize(n);
  const auto& kern = simd::kernels();
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto& p = pairs_[i * n + j];
      if (i == j) {
        p.mode = Mode::Zero;
        continue;
      }
      const std::size_t bytes = sizes_[i] * sizes_[j] * sizeof(double);
      if (used + bytes > dense_budget_bytes) {
        p.mode = collinear ? Mode::Expansion : Mode::Streamed;
        if (collinear && !transforms_[j]) transforms_[j] = std::make_shared<GaussTransform1d>(paths_[j]->x, sigma_);
        continue;
      }
      used += bytes;
      p.mode = Mode::Dense;
      p.rows.resize(sizes_[i] * sizes_[j]);
      for (std::size_t y = 0; y < sizes_[i]; ++y) {
        kern.penalty_row(rows_x_[i].data() + y * T, rows_y_[i].data() + y * T, paths_[j]->block(), gaussian_,
                         p.rows.data() + y * sizes_[j]);
      }
    }
  }
}

PenaltyCache PenaltyCache::from_matrices(
    std::vector<std::size_t> sizes, const std::vector<std::tuple<std::size_t, std::size_t, PenaltyMatrix>>& pairs) {
  PenaltyCache cache;
  const std::size_t n = sizes.size();
  cache.sizes_ = std::move(sizes);
  cache.pairs_.resize(n * n);
  for (auto& p : cache.pairs_) p.mode = Mode::Zero;
  for (const auto& [i, j, m] : pairs) {
    if (i >= n || j >= n || i >= j) throw PreconditionError("PenaltyCache: pair indices must satisfy i < j < n");
    if (m.rows != cache.sizes_[i] || m.cols != cache.sizes_[j]) {
      throw PreconditionError(fmt::format("PenaltyCache: matrix for ({}, {}) is {}x{}, expected {}x{}", i, j, m.rows,
                                          m.cols, cache.sizes_[i], cache.sizes_[j]));
    }
    auto& ij = cache.pairs_[i * n + j];
    auto& ji = cache.pairs_[j * n + i];
    ij.rows = m.values;
    ij.mode = Mode::Dense;
    ji.rows = m.transposed().values;
    ji.mode = Mode::Dense;
  }
  return cache;
}

double PenaltyCache::streamed_row_sum(std::size_t i, std::size_t y, std::size_t j, std::span<const double> w_j) const {
  const std::size_t T = paths_[i]->grid.steps;
  return simd::kernels().penalty_dot(rows_x_[i].data() + y * T, rows_y_[i].data() + y * T, paths_[j]->block(),
                                     gaussian_, w_j.data());
}

double PenaltyCache::weighted_row_sum(std::size_t i, std::size_t y, std::size_t j, std::span<const double> w_j) const {
  const auto& p = pair(i, j);
  switch (p.mode) {
    case Mode::Zero:
      return 0.0;
    case Mode::Dense:
      return simd::kernels().dot(p.rows.data() + y * sizes_[j], w_j.data(), sizes_[j]);
    case Mode::Streamed:
    case Mode::Expansion:
      break;
  }
  return streamed_row_sum(i, y, j, w_j);
}

void PenaltyCache::weighted_row_sums(std::size_t i, std::size_t j, std::span<const double> w_j,
                                     std::span<double> out) const {
  if (out.size() != sizes_[i] || w_j.size() != sizes_[j]) throw PreconditionError("weighted_row_sums: size mismatch");
  const auto& p = pair(i, j);
  if (p.mode == Mode::Expansion) {
    transforms_[j]->apply(w_j, paths_[i]->x, out);
    for (double& v : out) v *= gaussian_.peak;
    return;
  }
  for (std::size_t y = 0; y < sizes_[i]; ++y) out[y] = weighted_row_sum(i, y, j, w_j);
}

// ---------------------------------------------------------------------------
// Updates

namespace {

void check_cache(std::span<const SampleSet> sets, const PenaltyCache& cache) {
  if (cache.agents() != sets.size()) {
    throw PreconditionError(fmt::format("penalty cache covers {} agents, got {} sample sets", cache.agents(), sets.size()));
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (cache.samples(i) != sets[i].size()) throw PreconditionError("penalty cache does not match sample-set sizes");
  }
}

double gamma_unchecked(std::size_t i, std::size_t y, std::span<const SampleSet> sets, const PenaltyCache& cache) {
  double g = 0.0;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    if (j == i) continue;
    g += cache.weighted_row_sum(i, y, j, sets[j].weights()) / static_cast<double>(sets[j].size());
  }
  return g;
}

}  // namespace

double gamma_hat(std::size_t i, std::size_t y, std::span<const SampleSet> sets, const PenaltyCache& cache,
                 const std::vector<bool>& updated) {
  check_cache(sets, cache);
  if (i >= sets.size() || y >= sets[i].size()) throw PreconditionError("gamma_hat: index out of range");
  if (i < updated.size() && updated[i]) {
    throw PreconditionError(fmt::format("gamma_hat: agent {} was already updated in this sweep", i));
  }
  return gamma_unchecked(i, y, sets, cache);
}

namespace {

// Reweights agent i. If `pair_values` is given, entry j receives agent i's
// contribution to the (i, j) term of the objective at i's new weights and j's
// current weights, reusing the row sums already needed for gamma.
AgentUpdate apply_update(std::size_t i, std::span<SampleSet> sets, const PenaltyCache& cache, double gamma_clamp,
                         std::vector<double>* pair_values) {
  std::span<const SampleSet> view(sets.data(), sets.size());
  SampleSet& self = sets[i];
  const std::size_t m = self.size();
  std::vector<std::vector<double>> rows(sets.size());
  for (std::size_t j = 0; j < sets.size(); ++j) {
    if (j == i) continue;
    rows[j].resize(m);
    cache.weighted_row_sums(i, j, view[j].weights(), rows[j]);
  }

  std::vector<double> gamma(m, 0.0);
  AgentUpdate out;
  double gamma_max = 0.0;
  for (std::size_t y = 0; y < m; ++y) {
    double g = 0.0;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (j != i) g += rows[j][y] / static_cast<double>(sets[j].size());
    }
    gamma_max = std::max(gamma_max, g);
    if (g > gamma_clamp) {
      g = gamma_clamp;
      ++out.clamp_events;
    }
    gamma[y] = g;
  }
  if (out.clamp_events > 0) {
    spdlog::debug("agent {}: gamma clamped at {} for {} samples (max {:.3g})", self.agent(), gamma_clamp,
                  out.clamp_events, gamma_max);
  }

  auto w = self.mutable_weights();
  const double old_sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> next(m);
  double new_sum = 0.0;
  for (std::size_t y = 0; y < m; ++y) {
    next[y] = w[y] * std::exp(-gamma[y]);
    new_sum += next[y];
  }
  if (!(new_sum > 0.0)) {
    throw NumericalError(fmt::format("update_agent: all weights of agent {} underflowed (max gamma {:.3g}); "
                                     "the collision penalty scale is likely too large",
                                     self.agent(), gamma_max));
  }

  // KL(q_new || q_old) = -sum q_new gamma - log(sum q_old exp(-gamma)).
  double expected_gamma = 0.0;
  for (std::size_t y = 0; y < m; ++y) expected_gamma += next[y] / new_sum * gamma[y];
  out.kl = std::max(0.0, -expected_gamma - std::log(new_sum / old_sum));

  const double mean = new_sum / static_cast<double>(m);
  for (std::size_t y = 0; y < m; ++y) w[y] = next[y] / mean;

  if (pair_values != nullptr) {
    pair_values->assign(sets.size(), 0.0);
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (j == i) continue;
      double acc = 0.0;
      for (std::size_t y = 0; y < m; ++y) acc += w[y] * rows[j][y];
      (*pair_values)[j] = acc / (static_cast<double>(m) * static_cast<double>(sets[j].size()));
    }
  }
  return out;
}

}  // namespace

AgentUpdate update_agent(std::size_t i, std::span<SampleSet> sets, const PenaltyCache& cache,
                         const std::vector<bool>& updated, double gamma_clamp) {
  check_cache(sets, cache);
  if (i >= sets.size()) throw PreconditionError("update_agent: index out of range");
  if (i < updated.size() && updated[i]) {
    throw PreconditionError(fmt::format("update_agent: agent {} was already updated in this sweep", i));
  }
  return apply_update(i, sets, cache, gamma_clamp, nullptr);
}

double discrete_objective(std::span<const SampleSet> sets, const PenaltyCache& cache) {
  check_cache(sets, cache);
  double total = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto wi = sets[i].weights();
    std::vector<double> rows(sets[i].size());
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      cache.weighted_row_sums(i, j, sets[j].weights(), rows);
      double pair = 0.0;
      for (std::size_t y = 0; y < sets[i].size(); ++y) pair += wi[y] * rows[y];
      total += pair / (static_cast<double>(sets[i].size()) * static_cast<double>(sets[j].size()));
    }
  }
  return total;
}

SweepResult sweep(std::span<SampleSet> sets, const PenaltyCache& cache, std::span<const std::size_t> order,
                  double gamma_clamp) {
  check_cache(sets, cache);
  const std::size_t n = sets.size();
  std::vector<std::size_t> natural;
  if (order.empty()) {
    natural.resize(n);
    std::iota(natural.begin(), natural.end(), std::size_t{0});
    order = natural;
  }
  if (order.size() != n) throw PreconditionError("sweep: order must list every agent exactly once");
  std::vector<bool> updated(n, false);
  // pair_values[i][j] as left by agent i's update; for each pair the agent
  // updated later saw both final weight vectors.
  std::vector<std::vector<double>> pair_values(n);
  std::vector<std::size_t> position(n);
  SweepResult out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (i >= n || updated[i]) throw PreconditionError("sweep: order must be a permutation of the agents");
    const auto u = apply_update(i, sets, cache, gamma_clamp, &pair_values[i]);
    out.kl_sum += u.kl;
    out.clamp_events += u.clamp_events;
    updated[i] = true;
    position[i] = k;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.objective += position[i] > position[j] ? pair_values[i][j] : pair_values[j][i];
  }
  return out;
}

SolveReport solve(std::span<SampleSet> sets, const PenaltyCache& cache, const SolverConfig& cfg) {
  cfg.validate();
  if (sets.size() < 2) throw PreconditionError("solve: at least two sample sets required");
  SolveReport report;
  report.initial_objective = discrete_objective(std::span<const SampleSet>(sets.data(), sets.size()), cache);
  if (report.initial_objective < cfg.epsilon) {
    report.terminated_by = Termination::ObjectiveThreshold;
    return report;
  }
  const double kl_stop = std::max(cfg.kl_epsilon, 1e-12);
  while (true) {
    const auto s = sweep(sets, cache, cfg.order, cfg.gamma_clamp);
    ++report.sweeps;
    report.objective_trace.push_back(s.objective);
    report.kl_trace.push_back(s.kl_sum);
    report.clamp_events += s.clamp_events;
    if (s.objective < cfg.epsilon) {
      report.terminated_by = Termination::ObjectiveThreshold;
      break;
    }
    if (s.kl_sum < kl_stop) {
      report.terminated_by = Termination::FixedPoint;
      break;
    }
    if (report.sweeps >= cfg.max_sweeps) {
      report.terminated_by = Termination::MaxSweeps;
      break;
    }
  }
  return report;
}

SolveReport solve(std::span<SampleSet> sets, const CollisionKernel& k, const SolverConfig& cfg) {
  if (sets.size() < 2) throw PreconditionError("solve: at least two sample sets required");
  const PenaltyCache cache(std::span<const SampleSet>(sets.data(), sets.size()), k);
  return solve(sets, cache, cfg);
}

// ---------------------------------------------------------------------------
// Critical agents and selection

std::vector<double> interaction_scores(const Trajectory& robot_intent, std::span<const SampleSet> sets,
                                       const CollisionKernel& k) {
  k.validate();
  const std::size_t T = robot_intent.grid.steps;
  std::vector<double> ax(T), ay(T);
  for (std::size_t t = 0; t < T; ++t) {
    ax[t] = robot_intent.states[t].x;
    ay[t] = robot_intent.states[t].y;
  }
  const auto& kern = simd::kernels();
  std::vector<double> scores;
  scores.reserve(sets.size());
  for (const auto& s : sets) {
    require_same_grid(robot_intent.grid, s.grid(), "interaction_scores");
    const double sum = kern.penalty_dot(ax.data(), ay.data(), s.paths().block(), k.gaussian(), s.weights().data());
    scores.push_back(sum / static_cast<double>(s.size()));
  }
  return scores;
}

std::vector<std::size_t> select_critical(std::span<const double> scores, double threshold, std::size_t robot) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == robot || scores[i] > threshold) out.push_back(i);
  }
  if (robot >= scores.size()) out.insert(std::lower_bound(out.begin(), out.end(), robot), robot);
  return out;
}

std::vector<std::size_t> select_optimal_indices(std::span<const SampleSet> sets, std::span<const PreferenceGP> gps) {
  if (sets.size() != gps.size()) throw PreconditionError("select_optimal: one GP per sample set required");
  std::vector<std::size_t> out;
  out.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    require_same_grid(sets[i].grid(), gps[i].grid, "select_optimal");
    const GaussianLogDensity density(gps[i]);
    const auto w = sets[i].weights();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_j = sets[i].size();
    for (std::size_t j = 0; j < sets[i].size(); ++j) {
      if (!(w[j] > 0.0)) continue;
      const double score = density(sets[i].paths(), j) + std::log(w[j]);
      if (score > best) {
        best = score;
        best_j = j;
      }
    }
    if (best_j == sets[i].size()) {
      throw NumericalError(fmt::format("select_optimal: agent {} has no sample with positive weight", sets[i].agent()));
    }
    out.push_back(best_j);
  }
  return out;
}

std::vector<Trajectory> select_optimal(std::span<const SampleSet> sets, std::span<const PreferenceGP> gps) {
  const auto idx = select_optimal_indices(sets, gps);
  std::vector<Trajectory> out;
  out.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out.push_back(sets[i].trajectory(idx[i]));
  return out;
}

}  // namespace distnav

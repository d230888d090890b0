#pragma once

// Sequential iterative variational update over weighted samples.
//
// Each agent's preference is a fixed set of sample trajectories with weights.
// A sweep visits agents in order; agent i reweights its samples by
// exp(-gamma_i), where gamma_i is the Monte Carlo expected penalty against the
// other agents (already-updated agents contribute their new weights), then
// renormalises to mean 1. On the discrete support this is the exact minimiser
// of KL(q || q_old) + <q, gamma_i>, so every sweep lowers the joint expected
// penalty by at least the sum of the per-agent KL divergences.

#include "distnav/collision.hpp"
#include "distnav/gauss_transform.hpp"
#include "distnav/gp_preference.hpp"
#include "distnav/sample_set.hpp"

#include <memory>
#include <span>
#include <tuple>
#include <vector>

namespace distnav {

enum class Termination { ObjectiveThreshold, MaxSweeps, FixedPoint };

std::string_view termination_name(Termination t);

struct SolverConfig {
  /// Stop once the joint expected penalty falls below this.
  double epsilon = 1e-3;
  /// Stop once the summed KL of a sweep falls below max(kl_epsilon, 1e-12).
  double kl_epsilon = 0.0;
  std::size_t max_sweeps = 10;
  /// Interaction-score cutoff for critical agents (used by the planner).
  double critical_threshold = 1e-3;
  /// Update order as indices into the sample-set list; empty means 0..n-1.
  std::vector<std::size_t> order;
  /// gamma is clamped here before exponentiation.
  double gamma_clamp = 700.0;

  void validate() const;
};

struct SolveReport {
  std::size_t sweeps = 0;
  double initial_objective = 0.0;
  /// Joint expected penalty after each sweep.
  std::vector<double> objective_trace;
  /// Sum over agents of KL(new || old) for each sweep.
  std::vector<double> kl_trace;
  Termination terminated_by = Termination::MaxSweeps;
  std::size_t clamp_events = 0;
};

/// Penalty rows between every ordered pair of sample sets.
///
/// Sample paths never change during a solve, so pairs that fit the memory
/// budget are materialised once. Larger pairs are streamed, recomputing psi
/// on each use; for those, dense and streamed row sums are bit-identical.
/// Large single-step pairs whose points share one line (the 1D problems) use
/// a truncated Gaussian expansion instead, accurate to ~1e-16 of the row's
/// weight mass.
class PenaltyCache {
 public:
  static constexpr std::size_t kDefaultDenseBudget = std::size_t{256} << 20;

  enum class Mode { Zero, Dense, Streamed, Expansion };

  PenaltyCache(std::span<const SampleSet> sets, const CollisionKernel& k,
               std::size_t dense_budget_bytes = kDefaultDenseBudget);

  /// Explicit matrices for pairs (i, j), i < j, of size m_i x m_j; missing pairs are zero.
  static PenaltyCache from_matrices(std::vector<std::size_t> sizes,
                                    const std::vector<std::tuple<std::size_t, std::size_t, PenaltyMatrix>>& pairs);

  std::size_t agents() const { return sizes_.size(); }
  std::size_t samples(std::size_t i) const { return sizes_[i]; }
  Mode mode(std::size_t i, std::size_t j) const { return pair(i, j).mode; }

  /// sum_z psi(f_{i,y}, f_{j,z}) * w_j[z] for one y (exact, even for expansion pairs).
  double weighted_row_sum(std::size_t i, std::size_t y, std::size_t j, std::span<const double> w_j) const;
  /// The same for every y of agent i at once.
  void weighted_row_sums(std::size_t i, std::size_t j, std::span<const double> w_j, std::span<double> out) const;

 private:
  struct Pair {
    Mode mode = Mode::Streamed;
    std::vector<double> rows;  // m_i x m_j row-major when dense
  };

  PenaltyCache() = default;
  const Pair& pair(std::size_t i, std::size_t j) const { return pairs_[i * sizes_.size() + j]; }
  double streamed_row_sum(std::size_t i, std::size_t y, std::size_t j, std::span<const double> w_j) const;

  std::vector<std::size_t> sizes_;
  std::vector<Pair> pairs_;
  // Streaming state: paths per agent, sample-major copies for cheap row access.
  std::vector<std::shared_ptr<const PathStore>> paths_;
  std::vector<std::vector<double>> rows_x_, rows_y_;
  simd::GaussianPenalty gaussian_{};
  double sigma_ = 0.0;
  // Expansion state, per agent used as a source.
  std::vector<std::shared_ptr<const GaussTransform1d>> transforms_;
};

/// Monte Carlo gamma of sample y of agent i. Agents flagged in `updated` are
/// expected to already carry their new weights; i itself must not be flagged.
double gamma_hat(std::size_t i, std::size_t y, std::span<const SampleSet> sets, const PenaltyCache& cache,
                 const std::vector<bool>& updated);

struct AgentUpdate {
  double kl = 0.0;
  std::size_t clamp_events = 0;
};

/// Reweights agent i in place and returns KL(new || old) of its normalised weights.
AgentUpdate update_agent(std::size_t i, std::span<SampleSet> sets, const PenaltyCache& cache,
                         const std::vector<bool>& updated, double gamma_clamp = 700.0);

/// Discrete joint expected penalty sum_{i<j} (1/(m_i m_j)) sum_{y,z} psi w_{i,y} w_{j,z}.
double discrete_objective(std::span<const SampleSet> sets, const PenaltyCache& cache);

struct SweepResult {
  double kl_sum = 0.0;
  double objective = 0.0;
  std::size_t clamp_events = 0;
};

SweepResult sweep(std::span<SampleSet> sets, const PenaltyCache& cache, std::span<const std::size_t> order,
                  double gamma_clamp = 700.0);

SolveReport solve(std::span<SampleSet> sets, const PenaltyCache& cache, const SolverConfig& cfg);
SolveReport solve(std::span<SampleSet> sets, const CollisionKernel& k, const SolverConfig& cfg);

/// Expected penalty of each agent's weighted samples against a fixed robot intent.
std::vector<double> interaction_scores(const Trajectory& robot_intent, std::span<const SampleSet> sets,
                                       const CollisionKernel& k);

/// Indices with score > threshold, plus `robot` (always kept), ascending.
std::vector<std::size_t> select_critical(std::span<const double> scores, double threshold, std::size_t robot);

/// Per agent, the sample maximising log p0(f) + log w.
std::vector<Trajectory> select_optimal(std::span<const SampleSet> sets, std::span<const PreferenceGP> gps);
/// Index form of select_optimal.
std::vector<std::size_t> select_optimal_indices(std::span<const SampleSet> sets, std::span<const PreferenceGP> gps);

}  // namespace distnav

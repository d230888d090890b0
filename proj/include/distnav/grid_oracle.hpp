#pragma once

// Exact reference solver for one-dimensional preferences.
//
// Each agent's density lives on a shared uniform grid and is updated with the
// closed-form reweighting p <- p exp(-gamma) / Z, where gamma is the
// quadrature of the collision penalty against the other agents' current
// densities. This is what the sampled engine approximates; in 1D it is cheap
// enough to evaluate exactly and serves as the ground truth in tests.

#include "distnav/collision.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace distnav {

struct GridDensity {
  std::vector<double> xs;  // uniform spacing
  std::vector<double> ps;

  double spacing() const { return xs.size() > 1 ? xs[1] - xs[0] : 1.0; }
  double integral() const;
  /// Throws PreconditionError unless xs is uniform, ps >= 0 and integrates to 1 within tol.
  void validate(double tol = 1e-8) const;
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// N(mean, sd^2) sampled on xs and renormalised by the trapezoid rule.
GridDensity make_gaussian(std::span<const double> xs, double mean, double sd);

/// gamma_i on the grid: sum over j != i of the convolution of psi with p_j.
/// `k` must be one-dimensional.
std::vector<double> exact_gamma(std::size_t i, std::span<const GridDensity> densities, const CollisionKernel& k);

/// Quadrature of the joint expected penalty over all pairs.
double exact_objective(std::span<const GridDensity> densities, const CollisionKernel& k);

/// KL(p || q) on a shared grid, with both densities floored at 1e-300.
double grid_kl(const GridDensity& p, const GridDensity& q);

struct EvolutionHistory {
  /// densities[s][i]: agent i after s sweeps (s = 0 is the input).
  std::vector<std::vector<GridDensity>> densities;
  /// Exact J_c after s sweeps.
  std::vector<double> objective;
  /// Sum of per-agent KL(new || old) in sweep s + 1.
  std::vector<double> kl_sum;
};

/// Runs `sweeps` sequential sweeps in index order, updating `densities` in place.
EvolutionHistory exact_update(std::vector<GridDensity>& densities, const CollisionKernel& k, std::size_t sweeps);

/// Kolmogorov-Smirnov distance between a grid density and weighted 1D samples.
///
/// The grid is read as point masses at its nodes (trapezoid weights), so a
/// one-node spike against a sample at that node gives 0 and disjoint supports
/// give 1. Against a smooth density the discretisation adds at most h * max(p).
double ks_distance(const GridDensity& grid, std::span<const double> samples, std::span<const double> weights);

/// Writes `sweep,agent,x,p` rows for every density of the history.
void write_evolution_csv(std::ostream& os, const EvolutionHistory& h);

/// Three (or more) Gaussian agents on a line, the setting of the 1D experiments.
struct Scenario1d {
  std::vector<double> means{-1.0, 0.0, 1.0};
  std::vector<double> sds{0.5, 0.5, 0.5};
  double penalty_weight = 10.0;
  double penalty_sigma = 0.3;
  double grid_lo = -5.0;
  double grid_hi = 5.0;
  std::size_t grid_points = 2001;
  std::size_t sweeps = 10;

  void validate() const;
  CollisionKernel kernel() const { return {penalty_weight, penalty_sigma, 1}; }
  std::vector<GridDensity> initial_densities() const;
  /// m draws per agent from the initial Gaussians; agent i uses seed + i.
  std::vector<SampleSet> initial_samples(std::size_t m, std::uint64_t seed) const;

  /// Closer, wider starting preferences whose middle agent ends visibly bimodal.
  static Scenario1d wide();
};

}  // namespace distnav

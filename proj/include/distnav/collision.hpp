#pragma once

#include "distnav/common.hpp"
#include "distnav/sample_set.hpp"
#include "distnav/simd/kernels.hpp"

#include <span>
#include <vector>

namespace distnav {

/// Gaussian collision penalty psi(a, b) = max_t w * N(a(t) | b(t), sigma^2 I).
///
/// `dimension` is the dimension of the state the density is normalised over:
/// 2 for planar trajectories, 1 for the scalar problems of the grid oracle
/// (whose samples carry y = 0).
struct CollisionKernel {
  double weight = 10.0;
  double sigma = 0.35;
  int dimension = 2;

  void validate() const;
  /// Penalty of two coincident trajectories: w / ((2 pi)^(d/2) sigma^d).
  double peak() const;
  simd::GaussianPenalty gaussian() const { return {peak(), -1.0 / (2.0 * sigma * sigma)}; }
  /// Penalty of two points at distance d.
  double at_distance(double d) const;
};

double pairwise_penalty(const Trajectory& a, const Trajectory& b, const CollisionKernel& k);

/// Dense m_a x m_b matrix of pairwise penalties between two sample sets.
struct PenaltyMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  PenaltyMatrix() = default;
  PenaltyMatrix(std::size_t r, std::size_t c, std::vector<double> v);

  double operator()(std::size_t y, std::size_t z) const { return values[y * cols + z]; }
  std::span<const double> row(std::size_t y) const { return {values.data() + y * cols, cols}; }
  PenaltyMatrix transposed() const;
};

PenaltyMatrix penalty_matrix(const SampleSet& a, const SampleSet& b, const CollisionKernel& k);

/// Monte Carlo estimate of E[psi] under the two weighted sample sets.
double expected_penalty(const SampleSet& a, const SampleSet& b, const CollisionKernel& k);

/// Sum of expected_penalty over all unordered pairs.
double joint_expected_penalty(std::span<const SampleSet> sets, const CollisionKernel& k);

}  // namespace distnav

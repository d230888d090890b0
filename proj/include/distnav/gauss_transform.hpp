#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace distnav {

/// Weighted sums of a 1D Gaussian kernel, out[t] = sum_s w_s exp(-(x_t - s)^2 / (2 sigma^2)),
/// in O((sources + targets) * order) instead of O(sources * targets).
///
/// Sources are binned into boxes of width sigma. Around a box centre c, with
/// u = (x - c) / sigma and v = (s - c) / sigma,
///   exp(-(u - v)^2 / 2) = exp(-u^2 / 2) exp(-v^2 / 2) sum_k (u v)^k / k!,
/// so each box reduces to `kOrder` moments. All terms are non-negative in
/// magnitude-sum (no cancellation) and |v| <= 1/2, so truncating at 24 terms
/// leaves a relative error below 1e-18 of sum |w|. Boxes farther than
/// kCutoff sigma from a target are skipped (contribution below exp(-60)).
class GaussTransform1d {
 public:
  static constexpr std::size_t kOrder = 24;
  static constexpr double kCutoff = 12.0;

  GaussTransform1d(std::span<const double> sources, double sigma);

  std::size_t sources() const { return count_; }
  void apply(std::span<const double> weights, std::span<const double> targets, std::span<double> out) const;

 private:
  double sigma_ = 1.0;
  double lo_ = 0.0;
  std::size_t count_ = 0;
  std::size_t boxes_ = 0;
  std::vector<std::size_t> box_of_;  // per source
  std::vector<double> offset_;       // (s - centre) / sigma per source
};

}  // namespace distnav

#include "distnav/gauss_transform.hpp"

#include "distnav/common.hpp"

#include <algorithm>
#include <cmath>

namespace distnav {

GaussTransform1d::GaussTransform1d(std::span<const double> sources, double sigma)
    : sigma_(sigma), count_(sources.size()) {
  if (!(sigma > 0.0)) throw PreconditionError("GaussTransform1d: sigma must be positive");
  if (sources.empty()) throw PreconditionError("GaussTransform1d: no sources");
  const auto [mn, mx] = std::minmax_element(sources.begin(), sources.end());
  if (!std::isfinite(*mn) || !std::isfinite(*mx)) throw PreconditionError("GaussTransform1d: sources must be finite");
  lo_ = *mn;
  boxes_ = static_cast<std::size_t>(std::floor((*mx - lo_) / sigma_)) + 1;
  box_of_.resize(count_);
  offset_.resize(count_);
  for (std::size_t s = 0; s < count_; ++s) {
    const auto b = std::min(boxes_ - 1, static_cast<std::size_t>(std::floor((sources[s] - lo_) / sigma_)));
    box_of_[s] = b;
    offset_[s] = (sources[s] - (lo_ + (static_cast<double>(b) + 0.5) * sigma_)) / sigma_;
  }
}

void GaussTransform1d::apply(std::span<const double> weights, std::span<const double> targets,
                             std::span<double> out) const {
  if (weights.size() != count_) throw PreconditionError("GaussTransform1d: one weight per source required");
  if (out.size() != targets.size()) throw PreconditionError("GaussTransform1d: output size mismatch");

  // moments[b * kOrder + k] = sum_{s in b} w_s exp(-v^2/2) v^k / k!
  std::vector<double> moments(boxes_ * kOrder, 0.0);
  for (std::size_t s = 0; s < count_; ++s) {
    if (weights[s] == 0.0) continue;
    const double v = offset_[s];
    double term = weights[s] * std::exp(-0.5 * v * v);
    double* m = moments.data() + box_of_[s] * kOrder;
    for (std::size_t k = 0; k < kOrder; ++k) {
      m[k] += term;
      term *= v / static_cast<double>(k + 1);
    }
  }

  const double reach = kCutoff + 0.5;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double pos = (targets[t] - lo_) / sigma_;  // in box units
    const double first = std::ceil(pos - 0.5 - reach);
    const double last = std::floor(pos - 0.5 + reach);
    double sum = 0.0;
    if (last >= 0.0 && first < static_cast<double>(boxes_)) {
      const auto b0 = static_cast<std::size_t>(std::max(first, 0.0));
      const auto b1 = std::min(boxes_ - 1, static_cast<std::size_t>(last));
      for (std::size_t b = b0; b <= b1; ++b) {
        const double u = pos - (static_cast<double>(b) + 0.5);
        const double* m = moments.data() + b * kOrder;
        double poly = m[kOrder - 1];
        for (std::size_t k = kOrder - 1; k-- > 0;) poly = poly * u + m[k];
        sum += std::exp(-0.5 * u * u) * poly;
      }
    }
    out[t] = sum;
  }
}

}  // namespace distnav

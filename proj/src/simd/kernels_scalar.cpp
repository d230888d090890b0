#include "distnav/simd/kernels.hpp"
#include "exp_approx.hpp"

#include <limits>

namespace distnav::simd {
namespace {

inline double min_squared_distance(const double* ax, const double* ay, PathBlock b, std::size_t z) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < b.steps; ++t) {
    const double dx = ax[t] - b.x[t * b.count + z];
    const double dy = ay[t] - b.y[t * b.count + z];
    const double d2 = dx * dx + dy * dy;
    best = d2 < best ? d2 : best;
  }
  return best;
}

inline double penalty(double d2, GaussianPenalty g) {
  return g.peak * detail::exp_approx_scalar(d2 * g.neg_inv_two_var);
}

void penalty_row_scalar(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, double* out) {
  for (std::size_t z = 0; z < b.count; ++z) out[z] = penalty(min_squared_distance(ax, ay, b, z), g);
}

double penalty_dot_scalar(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, const double* w) {
  double acc = 0.0;
  for (std::size_t z = 0; z < b.count; ++z) acc += penalty(min_squared_distance(ax, ay, b, z), g) * w[z];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::Scalar, &penalty_row_scalar, &penalty_dot_scalar, &dot_scalar};
  return table;
}

double exp_approx(double x) { return detail::exp_approx_scalar(x); }

}  // namespace distnav::simd

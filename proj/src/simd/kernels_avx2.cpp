// Compiled with -mavx2 (no FMA) so lane results match the scalar reference bit for bit.
#include "distnav/simd/kernels.hpp"
#include "exp_approx.hpp"

#include <immintrin.h>

#include <limits>

namespace distnav::simd {
namespace {

using namespace detail;

inline __m256d exp_approx_avx2(__m256d x) {
  const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(kExpMin), _CMP_LT_OQ);
  const __m256d overflow = _mm256_cmp_pd(x, _mm256_set1_pd(kExpMax), _CMP_GT_OQ);
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpMin));
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpMax));

  const __m256d n = _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), _mm256_set1_pd(0.5)));
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));
  const __m256d r2 = _mm256_mul_pd(r, r);
  const __m256d r4 = _mm256_mul_pd(r2, r2);
  const __m256d r8 = _mm256_mul_pd(r4, r4);
  const auto lin = [&](double c0, double c1) {
    return _mm256_add_pd(_mm256_set1_pd(c0), _mm256_mul_pd(_mm256_set1_pd(c1), r));
  };
  const __m256d p01 = _mm256_add_pd(_mm256_set1_pd(1.0), r);
  const __m256d p23 = lin(kC2, kC3);
  const __m256d p45 = lin(kC4, kC5);
  const __m256d p67 = lin(kC6, kC7);
  const __m256d p89 = lin(kC8, kC9);
  const __m256d p1011 = lin(kC10, kC11);
  const __m256d q0 = _mm256_add_pd(p01, _mm256_mul_pd(p23, r2));
  const __m256d q1 = _mm256_add_pd(p45, _mm256_mul_pd(p67, r2));
  const __m256d q2 = _mm256_add_pd(p89, _mm256_mul_pd(p1011, r2));
  const __m256d s0 = _mm256_add_pd(q0, _mm256_mul_pd(q1, r4));
  const __m256d s1 = _mm256_add_pd(q2, _mm256_mul_pd(_mm256_set1_pd(kC12), r4));
  const __m256d e = _mm256_add_pd(s0, _mm256_mul_pd(s1, r8));

  // 2^52 + (n + 1023) holds the biased exponent in its low mantissa bits;
  // shifting them into place gives exactly 2^n without integer conversions.
  const __m256d biased = _mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), _mm256_set1_pd(0x1p52));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  __m256d out = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  out = _mm256_blendv_pd(out, _mm256_setzero_pd(), underflow);
  return _mm256_blendv_pd(out, _mm256_set1_pd(HUGE_VAL), overflow);
}

// psi for the four paths z..z+3 of b.
inline __m256d penalty4(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, std::size_t z) {
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < b.steps; ++t) {
    const __m256d dx = _mm256_sub_pd(_mm256_set1_pd(ax[t]), _mm256_loadu_pd(b.x + t * b.count + z));
    const __m256d dy = _mm256_sub_pd(_mm256_set1_pd(ay[t]), _mm256_loadu_pd(b.y + t * b.count + z));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    // min_pd(a, b) = a < b ? a : b, matching the scalar select.
    best = _mm256_min_pd(d2, best);
  }
  const __m256d arg = _mm256_mul_pd(best, _mm256_set1_pd(g.neg_inv_two_var));
  return _mm256_mul_pd(_mm256_set1_pd(g.peak), exp_approx_avx2(arg));
}

inline double penalty1(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, std::size_t z) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < b.steps; ++t) {
    const double dx = ax[t] - b.x[t * b.count + z];
    const double dy = ay[t] - b.y[t * b.count + z];
    const double d2 = dx * dx + dy * dy;
    best = d2 < best ? d2 : best;
  }
  return g.peak * exp_approx_scalar(best * g.neg_inv_two_var);
}

inline double horizontal_sum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

void penalty_row_avx2(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, double* out) {
  std::size_t z = 0;
  for (; z + 4 <= b.count; z += 4) _mm256_storeu_pd(out + z, penalty4(ax, ay, b, g, z));
  for (; z < b.count; ++z) out[z] = penalty1(ax, ay, b, g, z);
}

double penalty_dot_avx2(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, const double* w) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t z = 0;
  for (; z + 4 <= b.count; z += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(penalty4(ax, ay, b, g, z), _mm256_loadu_pd(w + z)));
  }
  double sum = horizontal_sum(acc);
  for (; z < b.count; ++z) sum += penalty1(ax, ay, b, g, z) * w[z];
  return sum;
}

// Same accumulation structure as penalty_dot_avx2, so a cached row dotted with
// weights reproduces the streamed sum exactly.
double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Backend::Avx2, &penalty_row_avx2, &penalty_dot_avx2, &dot_avx2};
  return &table;
}

}  // namespace distnav::simd

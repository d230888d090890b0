// Compiled with -mavx512f (FMA contraction off). scalef(e, n) equals the
// scalar e * 2^n exactly because every result on the clamped range is normal.
#include "distnav/simd/kernels.hpp"
#include "exp_approx.hpp"

#include <immintrin.h>

#include <limits>

namespace distnav::simd {
namespace {

using namespace detail;

inline __m512d exp_approx_avx512(__m512d x) {
  const __mmask8 underflow = _mm512_cmp_pd_mask(x, _mm512_set1_pd(kExpMin), _CMP_LT_OQ);
  const __mmask8 overflow = _mm512_cmp_pd_mask(x, _mm512_set1_pd(kExpMax), _CMP_GT_OQ);
  x = _mm512_max_pd(x, _mm512_set1_pd(kExpMin));
  x = _mm512_min_pd(x, _mm512_set1_pd(kExpMax));

  const __m512d n = _mm512_roundscale_pd(_mm512_add_pd(_mm512_mul_pd(x, _mm512_set1_pd(kLog2e)), _mm512_set1_pd(0.5)),
                                         _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
  __m512d r = _mm512_sub_pd(x, _mm512_mul_pd(n, _mm512_set1_pd(kLn2Hi)));
  r = _mm512_sub_pd(r, _mm512_mul_pd(n, _mm512_set1_pd(kLn2Lo)));
  const __m512d r2 = _mm512_mul_pd(r, r);
  const __m512d r4 = _mm512_mul_pd(r2, r2);
  const __m512d r8 = _mm512_mul_pd(r4, r4);
  const auto lin = [&](double c0, double c1) {
    return _mm512_add_pd(_mm512_set1_pd(c0), _mm512_mul_pd(_mm512_set1_pd(c1), r));
  };
  const __m512d p01 = _mm512_add_pd(_mm512_set1_pd(1.0), r);
  const __m512d q0 = _mm512_add_pd(p01, _mm512_mul_pd(lin(kC2, kC3), r2));
  const __m512d q1 = _mm512_add_pd(lin(kC4, kC5), _mm512_mul_pd(lin(kC6, kC7), r2));
  const __m512d q2 = _mm512_add_pd(lin(kC8, kC9), _mm512_mul_pd(lin(kC10, kC11), r2));
  const __m512d s0 = _mm512_add_pd(q0, _mm512_mul_pd(q1, r4));
  const __m512d s1 = _mm512_add_pd(q2, _mm512_mul_pd(_mm512_set1_pd(kC12), r4));
  const __m512d e = _mm512_add_pd(s0, _mm512_mul_pd(s1, r8));

  __m512d out = _mm512_scalef_pd(e, n);
  out = _mm512_mask_blend_pd(underflow, out, _mm512_setzero_pd());
  return _mm512_mask_blend_pd(overflow, out, _mm512_set1_pd(HUGE_VAL));
}

inline __m512d penalty8(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, std::size_t z) {
  __m512d best = _mm512_set1_pd(std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < b.steps; ++t) {
    const __m512d dx = _mm512_sub_pd(_mm512_set1_pd(ax[t]), _mm512_loadu_pd(b.x + t * b.count + z));
    const __m512d dy = _mm512_sub_pd(_mm512_set1_pd(ay[t]), _mm512_loadu_pd(b.y + t * b.count + z));
    const __m512d d2 = _mm512_add_pd(_mm512_mul_pd(dx, dx), _mm512_mul_pd(dy, dy));
    best = _mm512_min_pd(d2, best);
  }
  const __m512d arg = _mm512_mul_pd(best, _mm512_set1_pd(g.neg_inv_two_var));
  return _mm512_mul_pd(_mm512_set1_pd(g.peak), exp_approx_avx512(arg));
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

inline double horizontal_sum(__m512d v) {
  alignas(64) double l[8];
  _mm512_store_pd(l, v);
  return ((l[0] + l[1]) + (l[2] + l[3])) + ((l[4] + l[5]) + (l[6] + l[7]));
}

void penalty_row_avx512(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, double* out) {
  std::size_t z = 0;
  for (; z + 8 <= b.count; z += 8) _mm512_storeu_pd(out + z, penalty8(ax, ay, b, g, z));
  for (; z < b.count; ++z) out[z] = penalty1(ax, ay, b, g, z);
}

double penalty_dot_avx512(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, const double* w) {
  __m512d acc = _mm512_setzero_pd();
  std::size_t z = 0;
  for (; z + 8 <= b.count; z += 8) {
    acc = _mm512_add_pd(acc, _mm512_mul_pd(penalty8(ax, ay, b, g, z), _mm512_loadu_pd(w + z)));
  }
  double sum = horizontal_sum(acc);
  for (; z < b.count; ++z) sum += penalty1(ax, ay, b, g, z) * w[z];
  return sum;
}

double dot_avx512(const double* a, const double* b, std::size_t n) {
  __m512d acc = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm512_add_pd(acc, _mm512_mul_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i)));
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const KernelTable* avx512_kernels() {
  static const KernelTable table{Backend::Avx512, &penalty_row_avx512, &penalty_dot_avx512, &dot_avx512};
  return &table;
}

}  // namespace distnav::simd

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace distnav::simd::detail {

// exp(x) = 2^n exp(r), x = n ln2 + r with |r| <= ln2/2 (two-step Cody-Waite
// reduction). exp(r) is its degree-12 Taylor polynomial (truncation below
// 2e-16 relative) evaluated with Estrin's scheme: no division, short
// dependency chains. The AVX2 variant performs the same IEEE operations in
// the same order.
inline constexpr double kExpMin = -708.0;
inline constexpr double kExpMax = 709.0;
inline constexpr double kLog2e = 1.4426950408889634073599;
inline constexpr double kLn2Hi = 6.93145751953125E-1;
inline constexpr double kLn2Lo = 1.42860682030941723212E-6;
inline constexpr double kC2 = 1.0 / 2.0;
inline constexpr double kC3 = 1.0 / 6.0;
inline constexpr double kC4 = 1.0 / 24.0;
inline constexpr double kC5 = 1.0 / 120.0;
inline constexpr double kC6 = 1.0 / 720.0;
inline constexpr double kC7 = 1.0 / 5040.0;
inline constexpr double kC8 = 1.0 / 40320.0;
inline constexpr double kC9 = 1.0 / 362880.0;
inline constexpr double kC10 = 1.0 / 3628800.0;
inline constexpr double kC11 = 1.0 / 39916800.0;
inline constexpr double kC12 = 1.0 / 479001600.0;

inline double exp_approx_scalar(double x) {
  if (x < kExpMin) return 0.0;
  if (x > kExpMax) return HUGE_VAL;
  const double n = std::floor(x * kLog2e + 0.5);
  double r = x - n * kLn2Hi;
  r = r - n * kLn2Lo;
  const double r2 = r * r;
  const double r4 = r2 * r2;
  const double r8 = r4 * r4;
  const double p01 = 1.0 + r;
  const double p23 = kC2 + kC3 * r;
  const double p45 = kC4 + kC5 * r;
  const double p67 = kC6 + kC7 * r;
  const double p89 = kC8 + kC9 * r;
  const double p1011 = kC10 + kC11 * r;
  const double q0 = p01 + p23 * r2;
  const double q1 = p45 + p67 * r2;
  const double q2 = p89 + p1011 * r2;
  const double s0 = q0 + q1 * r4;
  const double s1 = q2 + kC12 * r4;
  const double e = s0 + s1 * r8;
  const auto bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52;
  return e * std::bit_cast<double>(bits);
}

}  // namespace distnav::simd::detail

#pragma once

// Data-parallel inner loops of the engine and the grid oracle.
//
// Every kernel has a scalar reference implementation and (on x86-64) AVX2 and
// AVX-512 variants; the widest supported one is chosen once at runtime from
// CPUID and can be forced with DISTNAV_SIMD=scalar|avx2|avx512 or set_backend(). Penalty values are
// bit-identical across backends (same operation sequence, shared exp
// polynomial, no FMA contraction); reductions differ only in summation order.

#include <cstddef>
#include <string_view>
#include <vector>

namespace distnav::simd {

enum class Backend { Scalar, Avx2, Avx512 };

/// `count` paths of `steps` planar points, stored time-major: x[t * count + j].
struct PathBlock {
  const double* x = nullptr;
  const double* y = nullptr;
  std::size_t count = 0;
  std::size_t steps = 0;
};

/// psi(d2) = peak * exp(neg_inv_two_var * d2), d2 the minimum squared distance over time.
struct GaussianPenalty {
  double peak = 0.0;
  double neg_inv_two_var = 0.0;
};

struct KernelTable {
  Backend backend;
  /// out[z] = psi(a, b_z); `ax`, `ay` hold the `b.steps` points of one path a.
  void (*penalty_row)(const double* ax, const double* ay, PathBlock b, GaussianPenalty g, double* out);
  /// sum_z psi(a, b_z) * w[z], without materialising the row.
  double (*penalty_dot)(const double* ax, const double* ay, PathBlock b, GaussianPenalty g,
                        const double* w);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();
const KernelTable* avx512_kernels();

bool cpu_supports(Backend b);
std::vector<Backend> available_backends();
std::string_view backend_name(Backend b);

/// Kernels used by the engine; resolved on first call.
const KernelTable& kernels();
Backend active_backend();
/// Throws PreconditionError if `b` is unavailable on this CPU/build.
void set_backend(Backend b);

/// Scalar exp used by every backend (range reduction plus degree-12 polynomial, ~1 ulp).
/// Returns exactly 0 below -708.
double exp_approx(double x);

}  // namespace distnav::simd

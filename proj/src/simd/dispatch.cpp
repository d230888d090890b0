#include "distnav/common.hpp"
#include "distnav/simd/kernels.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace distnav::simd {

#ifndef DISTNAV_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#ifndef DISTNAV_HAVE_AVX512
const KernelTable* avx512_kernels() { return nullptr; }
#endif

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(DISTNAV_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::Avx512:
#if defined(DISTNAV_HAVE_AVX512) && (defined(__x86_64__) || defined(__i386__))
      return avx512_kernels() != nullptr && __builtin_cpu_supports("avx512f");
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (cpu_supports(Backend::Avx2)) out.push_back(Backend::Avx2);
  if (cpu_supports(Backend::Avx512)) out.push_back(Backend::Avx512);
  return out;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Avx512:
      return "avx512";
  }
  return "unknown";
}

namespace {

const KernelTable& table_for(Backend b) {
  switch (b) {
    case Backend::Avx2:
      return *avx2_kernels();
    case Backend::Avx512:
      return *avx512_kernels();
    case Backend::Scalar:
      break;
  }
  return scalar_kernels();
}

const KernelTable* resolve_default() {
  Backend chosen = available_backends().back();
  if (const char* env = std::getenv("DISTNAV_SIMD")) {
    const std::string want(env);
    const auto backends = available_backends();
    const auto match = std::find_if(backends.begin(), backends.end(), [&](Backend b) { return backend_name(b) == want; });
    if (match != backends.end()) {
      chosen = *match;
    } else {
      spdlog::warn("DISTNAV_SIMD={} not available, using {}", want, backend_name(chosen));
    }
  }
  return &table_for(chosen);
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> ptr{resolve_default()};
  return ptr;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

Backend active_backend() { return kernels().backend; }

void set_backend(Backend b) {
  if (!cpu_supports(b)) {
    throw PreconditionError(std::string("SIMD backend not available: ") + std::string(backend_name(b)));
  }
  active().store(&table_for(b), std::memory_order_release);
}

}  // namespace distnav::simd

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sdelab/kernels.hpp"

namespace sdelab::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &detail::cascade_x3_scalar, &detail::cascade_rk4_scalar};
#if defined(SDELAB_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &detail::cascade_x3_avx2, &detail::cascade_rk4_avx2};
#endif
#if defined(SDELAB_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, &detail::cascade_x3_neon, &detail::cascade_rk4_neon};
#endif

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SDELAB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(SDELAB_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("SDELAB_SIMD"); env && std::string_view(env) == "scalar")
    return &kScalar;
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (const KernelTable* t = table_for(isa)) return t;
  return &kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* table_for(Isa isa) noexcept {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::Scalar:
      return &kScalar;
    case Isa::Avx2:
#if defined(SDELAB_HAVE_AVX2)
      return &kAvx2;
#else
      return nullptr;
#endif
    case Isa::Neon:
#if defined(SDELAB_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available() noexcept {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
    if (table_for(isa)) out.push_back(isa);
  return out;
}

const KernelTable& active() noexcept {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    const KernelTable* detected = detect();
    g_active.compare_exchange_strong(t, detected, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

bool force_isa(Isa isa) noexcept {
  const KernelTable* t = table_for(isa);
  if (!t) return false;
  g_active.store(t, std::memory_order_release);
  return true;
}

}  // namespace sdelab::kernels

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace prefine::simd {

namespace detail {

#if !defined(PREFINE_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(PREFINE_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(PREFINE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace detail

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
  return detail::cpu_has_avx2() ? detail::avx2_table() : nullptr;
}

const KernelTable* neon_kernels() { return detail::neon_table(); }

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &scalar_kernels();
    case Isa::avx2: return avx2_kernels();
    case Isa::neon: return neon_kernels();
  }
  return nullptr;
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("PREFINE_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) {
        if (const KernelTable* t = table_for(isa)) return t;
      }
    }
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{pick_default()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool set_active_isa(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) return false;
  active_slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace prefine::simd

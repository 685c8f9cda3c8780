#include "fourlevel/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace fourlevel::kernels {

#if defined(FOURLEVEL_HAVE_AVX2)
const KernelTable& avx2_table();  // avx2.cpp
#endif

namespace {

bool cpu_has_avx2() {
#if defined(FOURLEVEL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  const KernelTable* simd = avx2_kernels();
  if (const char* env = std::getenv("FOURLEVEL_KERNELS")) {
    const std::string_view want{env};
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && simd != nullptr) return simd;
  }
  return simd != nullptr ? simd : &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(FOURLEVEL_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

bool select_kernels(Isa isa) {
  const KernelTable* table = isa == Isa::Scalar ? &scalar_kernels() : avx2_kernels();
  if (table == nullptr) return false;
  current().store(table, std::memory_order_release);
  return true;
}

}  // namespace fourlevel::kernels

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "sono/kernels.hpp"

namespace sono::kernels {

#ifdef SONO_HAS_AVX2
const KernelTable& avx2_table_unchecked() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#ifdef SONO_HAS_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  if (supported) return &avx2_table_unchecked();
#endif
  return nullptr;
}

namespace {

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("SONO_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_table();
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

bool select_backend(Backend backend) noexcept {
  const KernelTable* t = backend == Backend::Scalar ? &scalar_table() : avx2_table();
  if (!t) return false;
  slot().store(t, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::Scalar ? "scalar" : "avx2";
}

}  // namespace sono::kernels

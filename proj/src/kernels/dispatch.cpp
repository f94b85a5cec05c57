#include <cstdlib>
#include <cstring>
#include <atomic>

#include "spinbath/kernels.hpp"

namespace spinbath::kernels {

const KernelTable* avx2_table_unchecked();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const KernelTable* fast = avx2_table();
  if (const char* env = std::getenv("SPINBATH_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_table();
    if (std::strcmp(env, "avx2") == 0 && fast != nullptr) return fast;
  }
  return fast != nullptr ? fast : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable* table = cpu_has_avx2() ? avx2_table_unchecked() : nullptr;
  return table;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    current().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  if (std::strcmp(name, "avx2") == 0 && avx2_table() != nullptr) {
    current().store(avx2_table(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace spinbath::kernels

#include "linbp/kernels.hpp"

#include <atomic>

namespace linbp::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Backend* pick_auto() {
  if (const Backend* b = avx2_backend(); b != nullptr && cpu_has_avx2()) return b;
  return &scalar_backend();
}

std::atomic<const Backend*>& current() {
  static std::atomic<const Backend*> backend{pick_auto()};
  return backend;
}

}  // namespace

const Backend& active() { return *current().load(std::memory_order_relaxed); }

bool select_backend(std::string_view name) {
  if (name == "auto") {
    current().store(pick_auto(), std::memory_order_relaxed);
    return true;
  }
  if (name == "scalar") {
    current().store(&scalar_backend(), std::memory_order_relaxed);
    return true;
  }
  if (name == "avx2") {
    const Backend* b = avx2_backend();
    if (b == nullptr || !cpu_has_avx2()) return false;
    current().store(b, std::memory_order_relaxed);
    return true;
  }
  return false;
}

}  // namespace linbp::kernels

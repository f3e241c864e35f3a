#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "vda/kernels.h"

namespace vda::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(VDA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  const char* env = std::getenv("VDA_KERNELS");
  if (env != nullptr && std::string(env) == "scalar") return Backend::kScalar;
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(initial_backend())};
  return slot;
}

}  // namespace

bool backend_supported(Backend backend) {
  return backend == Backend::kScalar || cpu_has_avx2();
}

const KernelTable& table(Backend backend) {
#ifdef VDA_HAVE_AVX2
  if (backend == Backend::kAvx2) return detail::kAvx2Table;
#endif
  (void)backend;
  return detail::kScalarTable;
}

Backend active_backend() {
  return active_slot().load() == &detail::kScalarTable ? Backend::kScalar : Backend::kAvx2;
}

void set_backend(Backend backend) {
  if (!backend_supported(backend))
    throw std::runtime_error("kernel backend '" + std::string(backend_name(backend)) +
                             "' is not supported on this CPU");
  active_slot().store(&table(backend));
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kScalar ? "scalar" : "avx2";
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

}  // namespace vda::kernels

// Dense double-precision kernels behind every hot loop in the project.
//
// Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active backend is chosen once at first use from the
// CPU feature set and the VDA_KERNELS environment variable ("scalar" or
// "avx2"); it can be switched explicitly with set_backend(). All matrices are
// row-major and densely packed.
#pragma once

#include <cstddef>
#include <string_view>

namespace vda::kernels {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // c[m x n] (+)= a[m x k] * b[n x k]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k, bool accumulate);
  // c[m x n] += a[m x k] * b[k x n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k);
  // c[m x n] += a[k x m]^T * b[k x n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k);
};

const KernelTable& table(Backend backend);
bool backend_supported(Backend backend);

Backend active_backend();
// Throws std::runtime_error when the backend is not supported on this CPU.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t n, std::size_t k, bool accumulate = false) {
  active().gemm_nt(a, b, c, m, n, k, accumulate);
}
inline void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t n, std::size_t k) {
  active().gemm_nn(a, b, c, m, n, k);
}
inline void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t n, std::size_t k) {
  active().gemm_tn(a, b, c, m, n, k);
}

namespace detail {
extern const KernelTable kScalarTable;
#ifdef VDA_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace vda::kernels

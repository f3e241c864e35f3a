#include "vda/kernels.h"

#ifdef VDA_HAVE_AVX2

#include <immintrin.h>

#include <algorithm>

namespace vda::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// 4 rows of a against 2 rows of b; eight dot products share every load.
void dot_block_4x2(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                   std::size_t k, double out[4][2]) {
  __m256d acc[4][2];
  for (auto& r : acc) r[0] = r[1] = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= k; p += 4) {
    const __m256d b0 = _mm256_loadu_pd(b + p);
    const __m256d b1 = _mm256_loadu_pd(b + ldb + p);
    for (int r = 0; r < 4; ++r) {
      const __m256d av = _mm256_loadu_pd(a + r * lda + p);
      acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 2; ++c) {
      double s = hsum(acc[r][c]);
      for (std::size_t q = p; q < k; ++q) s += a[r * lda + q] * b[c * ldb + q];
      out[r][c] = s;
    }
  }
}

void gemm_nt_avx2(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k, bool accumulate) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      double blk[4][2];
      dot_block_4x2(a + i * k, k, b + j * k, k, k, blk);
      for (int r = 0; r < 4; ++r) {
        for (int q = 0; q < 2; ++q) {
          double& dst = c[(i + r) * n + j + q];
          dst = accumulate ? dst + blk[r][q] : blk[r][q];
        }
      }
    }
    for (; j < n; ++j) {
      for (int r = 0; r < 4; ++r) {
        double s = dot_avx2(a + (i + r) * k, b + j * k, k);
        double& dst = c[(i + r) * n + j];
        dst = accumulate ? dst + s : s;
      }
    }
  }
  for (; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = dot_avx2(a + i * k, b + j * k, k);
      double& dst = c[i * n + j];
      dst = accumulate ? dst + s : s;
    }
  }
}

// c[m x n] += sum_p A(i, p) * b[p, :], where A(i, p) = a[i * rs + p * ps].
void gemm_strided_a(const double* a, std::size_t rs, std::size_t ps, const double* b,
                    double* c, std::size_t m, std::size_t n, std::size_t k) {
  constexpr std::size_t kBlockK = 128;
  for (std::size_t p0 = 0; p0 < k; p0 += kBlockK) {
    const std::size_t p1 = std::min(k, p0 + kBlockK);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      std::size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256d acc[4][2];
        for (int r = 0; r < 4; ++r) {
          acc[r][0] = _mm256_loadu_pd(c + (i + r) * n + j);
          acc[r][1] = _mm256_loadu_pd(c + (i + r) * n + j + 4);
        }
        for (std::size_t p = p0; p < p1; ++p) {
          const __m256d b0 = _mm256_loadu_pd(b + p * n + j);
          const __m256d b1 = _mm256_loadu_pd(b + p * n + j + 4);
          for (int r = 0; r < 4; ++r) {
            const __m256d av = _mm256_broadcast_sd(a + (i + r) * rs + p * ps);
            acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
            acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
          }
        }
        for (int r = 0; r < 4; ++r) {
          _mm256_storeu_pd(c + (i + r) * n + j, acc[r][0]);
          _mm256_storeu_pd(c + (i + r) * n + j + 4, acc[r][1]);
        }
      }
      if (j < n) {
        for (int r = 0; r < 4; ++r)
          for (std::size_t p = p0; p < p1; ++p)
            axpy_avx2(a[(i + r) * rs + p * ps], b + p * n + j, c + (i + r) * n + j, n - j);
      }
    }
    for (; i < m; ++i)
      for (std::size_t p = p0; p < p1; ++p)
        axpy_avx2(a[i * rs + p * ps], b + p * n, c + i * n, n);
  }
}

void gemm_nn_avx2(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k) {
  gemm_strided_a(a, k, 1, b, c, m, n, k);
}

void gemm_tn_avx2(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k) {
  gemm_strided_a(a, 1, m, b, c, m, n, k);
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table = {dot_avx2, axpy_avx2, gemm_nt_avx2, gemm_nn_avx2,
                                gemm_tn_avx2};
}  // namespace detail

}  // namespace vda::kernels

#endif  // VDA_HAVE_AVX2

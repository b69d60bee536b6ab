// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace xbar::simd::detail {

void vmm_avx2(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out) {
  std::fill(out, out + cols, 0.0);
  const std::size_t vec_end = cols & ~std::size_t{3};
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = g + i * cols;
    const __m256d vv = _mm256_set1_pd(vi);
    std::size_t j = 0;
    for (; j + 8 <= vec_end; j += 8) {
      __m256d acc0 = _mm256_loadu_pd(out + j);
      __m256d acc1 = _mm256_loadu_pd(out + j + 4);
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), vv, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4), vv, acc1);
      _mm256_storeu_pd(out + j, acc0);
      _mm256_storeu_pd(out + j + 4, acc1);
    }
    for (; j < vec_end; j += 4) {
      __m256d acc = _mm256_loadu_pd(out + j);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), vv, acc);
      _mm256_storeu_pd(out + j, acc);
    }
    for (; j < cols; ++j) out[j] += row[j] * vi;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void quantize_avx2(const double* x, double* out, std::size_t n, double lo, double hi,
                   double step) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d c = _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), vlo), vhi);
    __m256d t = _mm256_floor_pd(_mm256_add_pd(_mm256_div_pd(_mm256_sub_pd(c, vlo), vstep), half));
    __m256d q = _mm256_min_pd(_mm256_add_pd(vlo, _mm256_mul_pd(t, vstep)), vhi);
    _mm256_storeu_pd(out + i, q);
  }
  if (i < n) quantize_scalar(x + i, out + i, n - i, lo, hi, step);
}

}  // namespace xbar::simd::detail

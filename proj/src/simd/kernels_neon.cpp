#include <arm_neon.h>

#include <algorithm>

#include "kernels_impl.hpp"

namespace xbar::simd::detail {

void vmm_neon(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out) {
  std::fill(out, out + cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = g + i * cols;
    const float64x2_t vv = vdupq_n_f64(vi);
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2) {
      vst1q_f64(out + j, vfmaq_f64(vld1q_f64(out + j), vld1q_f64(row + j), vv));
    }
    for (; j < cols; ++j) out[j] += row[j] * vi;
  }
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void quantize_neon(const double* x, double* out, std::size_t n, double lo, double hi,
                   double step) {
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vhi = vdupq_n_f64(hi);
  const float64x2_t vstep = vdupq_n_f64(step);
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t c = vminq_f64(vmaxq_f64(vld1q_f64(x + i), vlo), vhi);
    float64x2_t t = vrndmq_f64(vaddq_f64(vdivq_f64(vsubq_f64(c, vlo), vstep), half));
    vst1q_f64(out + i, vminq_f64(vaddq_f64(vlo, vmulq_f64(t, vstep)), vhi));
  }
  if (i < n) quantize_scalar(x + i, out + i, n - i, lo, hi, step);
}

}  // namespace xbar::simd::detail

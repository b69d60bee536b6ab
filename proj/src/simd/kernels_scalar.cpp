#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace xbar::simd::detail {

void vmm_scalar(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out) {
  std::fill(out, out + cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* row = g + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += row[j] * vi;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void quantize_scalar(const double* x, double* out, std::size_t n, double lo, double hi,
                     double step) {
  for (std::size_t i = 0; i < n; ++i) {
    const double clipped = std::min(std::max(x[i], lo), hi);
    const double t = std::floor((clipped - lo) / step + 0.5);
    out[i] = std::min(lo + t * step, hi);
  }
}

}  // namespace xbar::simd::detail

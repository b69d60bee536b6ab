#pragma once

#include <cstddef>

namespace xbar::simd::detail {

void vmm_scalar(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out);
double dot_scalar(const double* a, const double* b, std::size_t n);
void quantize_scalar(const double* x, double* out, std::size_t n, double lo, double hi,
                     double step);

#if defined(XBAR_HAVE_AVX2)
void vmm_avx2(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out);
double dot_avx2(const double* a, const double* b, std::size_t n);
void quantize_avx2(const double* x, double* out, std::size_t n, double lo, double hi, double step);
#endif

#if defined(XBAR_HAVE_NEON)
void vmm_neon(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out);
double dot_neon(const double* a, const double* b, std::size_t n);
void quantize_neon(const double* x, double* out, std::size_t n, double lo, double hi, double step);
#endif

}  // namespace xbar::simd::detail

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace xbar::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

// Function table for the data-parallel inner loops. Every variant must agree
// with the scalar reference: bitwise for quantize, to rounding for the sums.
struct KernelTable {
  Isa isa;
  // out[j] = sum_i g[i * cols + j] * v[i]
  void (*vmm)(const double* g, std::size_t rows, std::size_t cols, const double* v, double* out);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[i] = min(lo + floor((clamp(x[i], lo, hi) - lo) / step + 0.5) * step, hi)
  void (*quantize)(const double* x, double* out, std::size_t n, double lo, double hi, double step);
};

const KernelTable& scalar_kernels();
// nullptr when the ISA was not compiled in or the CPU lacks it.
const KernelTable* kernels_for(Isa isa);
std::vector<Isa> available_isas();

// Best supported table. XBAR_SIMD=scalar|avx2|neon in the environment
// overrides the choice (falls back to scalar when unsupported).
const KernelTable& active_kernels();

inline void vmm(std::span<const double> g, std::size_t rows, std::size_t cols,
                std::span<const double> v, std::span<double> out) {
  active_kernels().vmm(g.data(), rows, cols, v.data(), out.data());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace xbar::simd

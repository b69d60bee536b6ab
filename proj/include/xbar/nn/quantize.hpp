#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace xbar::nn {

// Uniform quantizer with 2^bits levels spanning [lo, hi] inclusive. Inputs are
// saturated into the range first.
struct Quantizer {
  unsigned bits;
  double lo;
  double hi;

  Quantizer(unsigned bits, double lo, double hi);

  std::uint64_t levels() const { return std::uint64_t{1} << bits; }
  double step() const { return (hi - lo) / static_cast<double>(levels() - 1); }
  std::uint64_t code(double x) const;
  double level(std::uint64_t code) const { return lo + static_cast<double>(code) * step(); }
  double operator()(double x) const;
};

std::vector<double> quantize_fixed(std::span<const double> x, unsigned bits, double lo, double hi);

// Symmetric per-tensor range [-max|w|, +max|w|]; a zero tensor maps to [-1, 1].
std::vector<double> quantize_symmetric(std::span<const double> w, unsigned bits);

}  // namespace xbar::nn

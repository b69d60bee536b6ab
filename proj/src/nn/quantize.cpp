#include "xbar/nn/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xbar::nn {

Quantizer::Quantizer(unsigned bits_, double lo_, double hi_) : bits(bits_), lo(lo_), hi(hi_) {
  if (bits < 1 || bits > 52) throw std::invalid_argument("quantizer: bits must be in [1, 52]");
  if (!(lo < hi)) throw std::invalid_argument("quantizer: empty range");
}

std::uint64_t Quantizer::code(double x) const {
  const double clipped = std::clamp(x, lo, hi);
  const double t = std::floor((clipped - lo) / step() + 0.5);
  return std::min(static_cast<std::uint64_t>(t), levels() - 1);
}

// Same operation order as the vectorized kernels so results are bitwise equal.
double Quantizer::operator()(double x) const {
  const double s = step();
  const double clipped = std::clamp(x, lo, hi);
  const double t = std::floor((clipped - lo) / s + 0.5);
  return std::min(lo + t * s, hi);
}

std::vector<double> quantize_fixed(std::span<const double> x, unsigned bits, double lo, double hi) {
  const Quantizer q(bits, lo, hi);
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), q);
  return out;
}

std::vector<double> quantize_symmetric(std::span<const double> w, unsigned bits) {
  double m = 0.0;
  for (double v : w) m = std::max(m, std::abs(v));
  if (m == 0.0) m = 1.0;
  return quantize_fixed(w, bits, -m, m);
}

}  // namespace xbar::nn

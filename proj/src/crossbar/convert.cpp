#include "xbar/crossbar/convert.hpp"

#include <algorithm>

#include "xbar/nn/quantize.hpp"
#include "xbar/simd/kernels.hpp"

namespace xbar::crossbar {

std::vector<double> dac_convert(std::span<const double> x, unsigned bits, double v_max) {
  std::vector<double> out(x.size());
  if (bits == 0) {
    std::transform(x.begin(), x.end(), out.begin(),
                   [&](double v) { return std::clamp(v, -1.0, 1.0) * v_max; });
    return out;
  }
  const nn::Quantizer q(bits, -1.0, 1.0);
  simd::active_kernels().quantize(x.data(), out.data(), x.size(), q.lo, q.hi, q.step());
  for (double& v : out) v *= v_max;
  return out;
}

std::vector<std::uint32_t> adc_convert(std::span<const double> current, unsigned bits,
                                       double full_scale) {
  const nn::Quantizer q(bits, -full_scale, full_scale);
  std::vector<std::uint32_t> out(current.size());
  std::transform(current.begin(), current.end(), out.begin(),
                 [&](double i) { return static_cast<std::uint32_t>(q.code(i)); });
  return out;
}

double adc_level(std::uint32_t code, unsigned bits, double full_scale) {
  return nn::Quantizer(bits, -full_scale, full_scale).level(code);
}

double adc_sample(double current, unsigned bits, double full_scale) {
  if (bits == 0) return current;
  return nn::Quantizer(bits, -full_scale, full_scale)(current);
}

}  // namespace xbar::crossbar

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace xbar::crossbar {

// Normalized inputs in [-1, 1] to drive voltages in [-v_max, v_max] on a
// 2^bits-level grid. bits = 0 saturates without quantizing.
std::vector<double> dac_convert(std::span<const double> x, unsigned bits, double v_max);

// Currents to codes 0 .. 2^bits - 1 over [-full_scale, +full_scale].
std::vector<std::uint32_t> adc_convert(std::span<const double> current, unsigned bits,
                                       double full_scale);
double adc_level(std::uint32_t code, unsigned bits, double full_scale);
// Round trip current -> code -> current; bits = 0 passes the value through.
double adc_sample(double current, unsigned bits, double full_scale);

}  // namespace xbar::crossbar

#pragma once

#include <cstddef>
#include <cstdint>

#include "xbar/nn/network.hpp"
#include "xbar/nn/weights_io.hpp"

namespace xbar::nn {

// Random network with N(0, 1/fan_in) weights and 0.1x that for biases.
NetworkParams random_params(const NetworkSpec& spec, std::uint64_t seed);

// Labelled set for a two-output network: inputs N(0, 0.4^2) clamped to
// [-1, 1], label = float argmax, samples with |l1 - l0| < min_margin dropped.
SampleSet synthetic_samples(const NetworkSpec& spec, const NetworkParams& params,
                            std::size_t count, std::uint64_t seed, double min_margin = 0.1);

}  // namespace xbar::nn

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xbar/nn/network.hpp"

namespace xbar::nn {

// Channel-major multi-channel signal: data[c * length + i].
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t length = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(std::size_t c, std::size_t l) : channels(c), length(l), data(c * l, 0.0) {}
  static FeatureMap from_signal(std::span<const double> signal);

  double& at(std::size_t c, std::size_t i) { return data[c * length + i]; }
  double at(std::size_t c, std::size_t i) const { return data[c * length + i]; }
};

// kernels laid out {out_channels, in_channels, k}; zero padding.
FeatureMap conv1d(const FeatureMap& input, std::span<const double> kernels,
                  std::span<const double> bias, std::size_t out_channels, std::size_t kernel_size,
                  std::size_t stride, std::size_t pad_left, std::size_t pad_right);

// Floor mode: trailing elements that do not fill a window are dropped.
FeatureMap avgpool1d(const FeatureMap& input, std::size_t k = 2, std::size_t s = 2);

std::vector<double> relu(std::span<const double> x);

// y = W^T x + b with W stored {in, out} row-major.
std::vector<double> fully_connected(std::span<const double> x, std::span<const double> weights,
                                    std::span<const double> bias);

FeatureMap concat_channels(std::span<const FeatureMap> parts);

struct ForwardTrace {
  std::vector<FeatureMap> branch_outputs;  // conv outputs before pooling, all blocks
  std::vector<double> flattened;
  std::vector<std::vector<double>> dense_inputs;  // input vector of every FC layer
  std::vector<double> logits;
};

std::vector<double> forward(const NetworkSpec& spec, const NetworkParams& params,
                            std::span<const double> input);

ForwardTrace forward_trace(const NetworkSpec& spec, const NetworkParams& params,
                           std::span<const double> input);

std::size_t argmax(std::span<const double> logits);

}  // namespace xbar::nn

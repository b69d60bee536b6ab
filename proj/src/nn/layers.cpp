#include "xbar/nn/layers.hpp"

#include <cmath>
#include <string>

namespace xbar::nn {

FeatureMap FeatureMap::from_signal(std::span<const double> signal) {
  FeatureMap fm(1, signal.size());
  std::copy(signal.begin(), signal.end(), fm.data.begin());
  return fm;
}

FeatureMap conv1d(const FeatureMap& input, std::span<const double> kernels,
                  std::span<const double> bias, std::size_t out_channels, std::size_t kernel_size,
                  std::size_t stride, std::size_t pad_left, std::size_t pad_right) {
  if (kernel_size < 1 || stride < 1) throw SpecError("conv1d: kernel size and stride must be >= 1");
  if (kernels.size() != out_channels * input.channels * kernel_size) {
    throw SpecError("conv1d: kernel tensor size mismatch");
  }
  if (bias.size() != out_channels) throw SpecError("conv1d: bias length mismatch");
  const std::size_t padded = input.length + pad_left + pad_right;
  if (padded < kernel_size) throw SpecError("conv1d: output length < 1");
  const std::size_t out_len = (padded - kernel_size) / stride + 1;

  FeatureMap out(out_channels, out_len);
  for (std::size_t c = 0; c < out_channels; ++c) {
    for (std::size_t i = 0; i < out_len; ++i) {
      double acc = bias[c];
      for (std::size_t j = 0; j < input.channels; ++j) {
        const double* k = &kernels[(c * input.channels + j) * kernel_size];
        for (std::size_t t = 0; t < kernel_size; ++t) {
          const std::size_t p = i * stride + t;  // index into the padded signal
          if (p < pad_left || p >= pad_left + input.length) continue;
          acc += k[t] * input.at(j, p - pad_left);
        }
      }
      out.at(c, i) = acc;
    }
  }
  return out;
}

FeatureMap avgpool1d(const FeatureMap& input, std::size_t k, std::size_t s) {
  if (k < 1 || s < 1) throw SpecError("avgpool1d: k and s must be >= 1");
  if (input.length < k) {
    throw SpecError("avgpool1d: input length " + std::to_string(input.length) +
                    " shorter than window " + std::to_string(k));
  }
  const std::size_t out_len = (input.length - k) / s + 1;
  FeatureMap out(input.channels, out_len);
  for (std::size_t c = 0; c < input.channels; ++c) {
    for (std::size_t i = 0; i < out_len; ++i) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += input.at(c, i * s + t);
      out.at(c, i) = acc / static_cast<double>(k);
    }
  }
  return out;
}

std::vector<double> relu(std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

std::vector<double> fully_connected(std::span<const double> x, std::span<const double> weights,
                                    std::span<const double> bias) {
  const std::size_t out = bias.size();
  if (weights.size() != x.size() * out) {
    throw SpecError("fully_connected: weight shape " + std::to_string(weights.size()) +
                    " does not match " + std::to_string(x.size()) + "x" + std::to_string(out));
  }
  std::vector<double> y(bias.begin(), bias.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double* row = &weights[i * out];
    for (std::size_t j = 0; j < out; ++j) y[j] += row[j] * x[i];
  }
  return y;
}

FeatureMap concat_channels(std::span<const FeatureMap> parts) {
  if (parts.empty()) return {};
  const std::size_t len = parts.front().length;
  std::size_t channels = 0;
  for (const auto& p : parts) {
    if (p.length != len) throw SpecError("concat: branch lengths differ");
    channels += p.channels;
  }
  FeatureMap out(channels, len);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.data.begin(), p.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.data.size();
  }
  return out;
}

ForwardTrace forward_trace(const NetworkSpec& spec, const NetworkParams& params,
                           std::span<const double> input) {
  if (input.size() != spec.input_length) {
    throw SpecError("forward: input length " + std::to_string(input.size()) + " != " +
                    std::to_string(spec.input_length));
  }
  for (double v : input) {
    if (!std::isfinite(v)) throw SpecError("forward: non-finite input");
  }
  validate_params(spec, params);

  ForwardTrace trace;
  FeatureMap x = FeatureMap::from_signal(input);
  for (const auto& block : spec.blocks) {
    std::vector<FeatureMap> pooled;
    for (const auto& conv : block.branches) {
      const auto& p = params.at(conv.name);
      FeatureMap y = conv1d(x, p.weights, p.bias, conv.out_channels, conv.kernel_size, conv.stride,
                            conv.pad_left, conv.pad_right);
      trace.branch_outputs.push_back(y);
      pooled.push_back(avgpool1d(y, block.pool.kernel_size, block.pool.stride));
    }
    x = concat_channels(pooled);
  }

  std::vector<double> h = x.data;
  trace.flattened = h;
  for (std::size_t d = 0; d < spec.dense.size(); ++d) {
    const auto& p = params.at(spec.dense[d].name);
    trace.dense_inputs.push_back(h);
    h = fully_connected(h, p.weights, p.bias);
    if (d + 1 < spec.dense.size()) h = relu(h);
  }
  trace.logits = std::move(h);
  return trace;
}

std::vector<double> forward(const NetworkSpec& spec, const NetworkParams& params,
                            std::span<const double> input) {
  return forward_trace(spec, params, input).logits;
}

std::size_t argmax(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

}  // namespace xbar::nn

#include "xbar/nn/network.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace xbar::nn {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv1D: return "Conv1D";
    case LayerKind::AvgPool1D: return "AvgPool1D";
    case LayerKind::ReLU: return "ReLU";
    case LayerKind::FullyConnected: return "FullyConnected";
    case LayerKind::Concat: return "Concat";
  }
  return "?";
}

std::size_t LayerSpec::output_length() const {
  if (kernel_size < 1 || stride < 1) {
    throw SpecError(name + ": kernel size and stride must be >= 1");
  }
  const std::size_t padded = padded_length();
  if (padded < kernel_size) {
    throw SpecError(name + ": non-positive output length (input " + std::to_string(in_length) +
                    ", kernel " + std::to_string(kernel_size) + ")");
  }
  return (padded - kernel_size) / stride + 1;
}

std::size_t LayerSpec::weight_count() const {
  switch (kind) {
    case LayerKind::Conv1D: return out_channels * in_channels * kernel_size;
    case LayerKind::FullyConnected: return in_features * out_features;
    default: return 0;
  }
}

std::size_t LayerSpec::bias_count() const {
  switch (kind) {
    case LayerKind::Conv1D: return out_channels;
    case LayerKind::FullyConnected: return out_features;
    default: return 0;
  }
}

std::size_t ConvBlock::out_channels() const {
  std::size_t total = 0;
  for (const auto& b : branches) total += b.out_channels;
  return total;
}

std::size_t NetworkSpec::flatten_width() const {
  if (blocks.empty()) return input_length;
  return blocks.back().out_channels() * blocks.back().pooled_length;
}

std::vector<LayerSpec> NetworkSpec::layers() const {
  std::vector<LayerSpec> out;
  for (const auto& block : blocks) {
    for (const auto& b : block.branches) out.push_back(b);
    out.push_back(block.pool);
    LayerSpec cat;
    cat.kind = LayerKind::Concat;
    cat.name = "concat";
    cat.in_channels = block.out_channels();
    cat.out_channels = block.out_channels();
    cat.in_length = block.pooled_length;
    out.push_back(cat);
  }
  for (std::size_t d = 0; d < dense.size(); ++d) {
    out.push_back(dense[d]);
    if (d + 1 < dense.size()) {
      LayerSpec act;
      act.kind = LayerKind::ReLU;
      act.name = "relu" + std::to_string(d + 1);
      act.in_length = dense[d].out_features;
      act.in_channels = act.out_channels = 1;
      out.push_back(act);
    }
  }
  return out;
}

std::vector<LayerSpec> NetworkSpec::parameter_layers() const {
  std::vector<LayerSpec> out;
  for (const auto& block : blocks) {
    for (const auto& b : block.branches) out.push_back(b);
  }
  for (const auto& d : dense) out.push_back(d);
  return out;
}

const LayerSpec& NetworkSpec::layer(const std::string& name) const {
  for (const auto& block : blocks) {
    for (const auto& b : block.branches) {
      if (b.name == name) return b;
    }
  }
  for (const auto& d : dense) {
    if (d.name == name) return d;
  }
  throw SpecError("no layer named " + name);
}

namespace {

std::size_t pooled(std::size_t conv_len) { return conv_len < 2 ? 0 : (conv_len - 2) / 2 + 1; }

// Minimal left padding so every branch reaches the longest branch's pooled
// length. Branches whose unpadded output is empty are an error.
void align_branches(std::vector<LayerSpec>& branches, std::size_t& pooled_length) {
  std::size_t target = 0;
  for (auto& b : branches) {
    b.pad_left = b.pad_right = 0;
    const std::size_t len = b.output_length();
    if (pooled(len) == 0) {
      throw SpecError(b.name + ": conv output too short for 2-wide pooling");
    }
    target = std::max(target, pooled(len));
  }
  for (auto& b : branches) {
    while (pooled(b.output_length()) < target) ++b.pad_left;
  }
  pooled_length = target;
}

}  // namespace

NetworkSpec build_network_architecture(std::size_t m, std::size_t n, std::size_t blocks,
                                       std::size_t fc_layers,
                                       std::span<const std::size_t> alpha,
                                       std::span<const std::size_t> beta, bool parallel) {
  if (m < 1 || n < 1) throw SpecError("m and n must be >= 1");
  if (n / 2 < 1) throw SpecError("n must give at least one output channel per branch");
  if (fc_layers < 1) throw SpecError("at least one fully connected layer is required");
  if (alpha.size() != blocks) {
    throw SpecError("dimension mismatch: |alpha| = " + std::to_string(alpha.size()) +
                    ", L = " + std::to_string(blocks));
  }
  if (beta.size() != fc_layers - 1) {
    throw SpecError("dimension mismatch: |beta| = " + std::to_string(beta.size()) +
                    ", D - 1 = " + std::to_string(fc_layers - 1));
  }

  NetworkSpec spec;
  spec.input_length = m;
  spec.filters = n;
  spec.blocks_count = blocks;
  spec.fc_count = fc_layers;
  spec.alpha.assign(alpha.begin(), alpha.end());
  spec.beta.assign(beta.begin(), beta.end());
  spec.parallel = parallel;

  std::size_t channels = 1;
  std::size_t length = m;
  std::size_t conv_index = 1;
  for (std::size_t l = 0; l < blocks; ++l) {
    ConvBlock block;
    std::vector<std::size_t> kernels;
    if (parallel) {
      if (alpha[l] < 1 || m < 3 || alpha[l] > m - 3) {
        throw SpecError("alpha[" + std::to_string(l) + "] = " + std::to_string(alpha[l]) +
                        " outside [1, m - 3]");
      }
      kernels = {alpha[l], m - 2 - alpha[l]};
    } else {
      kernels = {m - 1};
    }
    for (std::size_t k : kernels) {
      LayerSpec conv;
      conv.kind = LayerKind::Conv1D;
      conv.name = "conv" + std::to_string(conv_index++);
      conv.in_channels = channels;
      conv.out_channels = n / 2;
      conv.kernel_size = k;
      conv.stride = 1;
      conv.in_length = length;
      block.branches.push_back(conv);
    }
    align_branches(block.branches, block.pooled_length);
    block.pool.kind = LayerKind::AvgPool1D;
    block.pool.name = "pool" + std::to_string(l + 1);
    block.pool.kernel_size = 2;
    block.pool.stride = 2;
    block.pool.in_channels = block.pool.out_channels = block.out_channels();
    block.pool.in_length = block.branches.front().output_length();
    channels = block.out_channels();
    length = block.pooled_length;
    spec.blocks.push_back(std::move(block));
  }

  std::size_t in = spec.flatten_width();
  for (std::size_t d = 0; d < fc_layers; ++d) {
    LayerSpec fc;
    fc.kind = LayerKind::FullyConnected;
    fc.name = "fc" + std::to_string(d + 1);
    fc.in_features = in;
    fc.out_features = d + 1 < fc_layers ? beta[d] : 2;
    if (fc.out_features < 1) throw SpecError(fc.name + ": output width must be >= 1");
    fc.in_length = in;
    spec.dense.push_back(fc);
    in = fc.out_features;
  }
  return spec;
}

NetworkSpec canonical_network() {
  const std::size_t alpha[] = {32};
  const std::size_t beta[] = {8};
  return build_network_architecture(64, 64, 1, 2, alpha, beta, true);
}

std::size_t count_parameters(const NetworkSpec& spec) {
  std::size_t total = 0;
  for (const auto& layer : spec.parameter_layers()) {
    total += layer.weight_count() + layer.bias_count();
  }
  return total;
}

const LayerParams* NetworkParams::find(const std::string& name) const {
  for (const auto& l : layers) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

const LayerParams& NetworkParams::at(const std::string& name) const {
  if (const auto* p = find(name)) return *p;
  throw SpecError("parameters missing layer " + name);
}

LayerParams& NetworkParams::at(const std::string& name) {
  return const_cast<LayerParams&>(std::as_const(*this).at(name));
}

namespace {

std::vector<std::size_t> expected_dims(const LayerSpec& layer) {
  if (layer.kind == LayerKind::Conv1D) {
    return {layer.out_channels, layer.in_channels, layer.kernel_size};
  }
  return {layer.in_features, layer.out_features};
}

}  // namespace

NetworkParams zero_params(const NetworkSpec& spec) {
  NetworkParams params;
  for (const auto& layer : spec.parameter_layers()) {
    LayerParams p;
    p.name = layer.name;
    p.dims = expected_dims(layer);
    p.weights.assign(layer.weight_count(), 0.0);
    p.bias.assign(layer.bias_count(), 0.0);
    params.layers.push_back(std::move(p));
  }
  return params;
}

void validate_params(const NetworkSpec& spec, const NetworkParams& params) {
  const auto layers = spec.parameter_layers();
  for (const auto& layer : layers) {
    const LayerParams* p = params.find(layer.name);
    if (p == nullptr) throw SpecError("parameter/spec mismatch: missing layer " + layer.name);
    if (p->dims != expected_dims(layer) || p->weights.size() != layer.weight_count()) {
      throw SpecError("parameter/spec mismatch in layer " + layer.name + ": weight shape");
    }
    if (p->bias.size() != layer.bias_count()) {
      throw SpecError("parameter/spec mismatch in layer " + layer.name + ": bias length");
    }
  }
  if (params.layers.size() != layers.size()) {
    throw SpecError("parameter/spec mismatch: " + std::to_string(params.layers.size()) +
                    " parameter layers for " + std::to_string(layers.size()) + " spec layers");
  }
}

}  // namespace xbar::nn

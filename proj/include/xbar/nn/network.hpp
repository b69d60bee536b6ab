#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xbar::nn {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LayerKind { Conv1D, AvgPool1D, ReLU, FullyConnected, Concat };

const char* to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::Conv1D;
  std::string name;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 1;
  std::size_t stride = 1;
  std::size_t pad_left = 0;
  std::size_t pad_right = 0;
  std::size_t in_length = 0;   // per-channel length entering the layer
  std::size_t out_features = 0;  // FullyConnected only
  std::size_t in_features = 0;   // FullyConnected only

  // floor((L + pl + pr - k) / s) + 1; throws SpecError when it would be < 1.
  std::size_t output_length() const;
  std::size_t padded_length() const { return in_length + pad_left + pad_right; }
  std::size_t weight_count() const;
  std::size_t bias_count() const;
  bool has_parameters() const {
    return kind == LayerKind::Conv1D || kind == LayerKind::FullyConnected;
  }
};

// One block of parallel convolution branches followed by a shared pooling
// stage. Branch outputs are concatenated along channels in branch order.
struct ConvBlock {
  std::vector<LayerSpec> branches;
  LayerSpec pool;
  std::size_t pooled_length = 0;
  std::size_t out_channels() const;
};

struct NetworkSpec {
  std::size_t input_length = 0;  // m
  std::size_t filters = 0;       // n
  std::size_t blocks_count = 0;  // L
  std::size_t fc_count = 0;      // D
  std::vector<std::size_t> alpha;
  std::vector<std::size_t> beta;
  bool parallel = true;

  std::vector<ConvBlock> blocks;
  std::vector<LayerSpec> dense;  // FC layers in order; ReLU between them

  std::size_t flatten_width() const;
  // Ordered layer list including pooling, concat and ReLU stages.
  std::vector<LayerSpec> layers() const;
  // Parameterized layers (conv branches then FC), in weight-file order.
  std::vector<LayerSpec> parameter_layers() const;
  const LayerSpec& layer(const std::string& name) const;
};

NetworkSpec build_network_architecture(std::size_t m, std::size_t n, std::size_t blocks,
                                       std::size_t fc_layers,
                                       std::span<const std::size_t> alpha,
                                       std::span<const std::size_t> beta, bool parallel = true);

// m=64, n=64, L=1, D=2, alpha=[32], beta=[8].
NetworkSpec canonical_network();

std::size_t count_parameters(const NetworkSpec& spec);

struct LayerParams {
  std::string name;
  std::vector<std::size_t> dims;  // conv: {out, in, k}; fc: {in, out}
  std::vector<double> weights;    // row-major over dims
  std::vector<double> bias;
};

struct FixedPointTag {
  unsigned bits = 0;
  double scale = 0.0;
};

struct NetworkParams {
  std::vector<LayerParams> layers;
  std::optional<FixedPointTag> fixed_point;

  const LayerParams& at(const std::string& name) const;
  LayerParams& at(const std::string& name);
  const LayerParams* find(const std::string& name) const;
};

// Zero-initialized parameters with shapes matching the spec.
NetworkParams zero_params(const NetworkSpec& spec);

// Throws SpecError naming the first layer whose shapes disagree.
void validate_params(const NetworkSpec& spec, const NetworkParams& params);

}  // namespace xbar::nn

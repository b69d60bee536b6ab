#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xbar/nn/network.hpp"

namespace xbar::nn {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MXW1: little-endian, "MXW1", u16 version, u16 layer_count, then per layer
// u8 name_len, name, u8 rank, u32 dims[rank], f32 weights, u32 bias_len,
// f32 bias. No padding.
NetworkParams read_weights(std::istream& in);
NetworkParams read_weights(const std::filesystem::path& path);
void write_weights(std::ostream& out, const NetworkParams& params);
void write_weights(const std::filesystem::path& path, const NetworkParams& params);

// Recovers the architecture a weight file describes (two-branch blocks with
// kernel sizes summing to m - 2, FC stack ending in 2 outputs) and validates
// every layer shape against it.
NetworkSpec infer_spec(const NetworkParams& params);

// MXI1: "MXI1", u16 version, u32 sample_count, u32 length, u8 has_labels,
// f32 samples[count * length], then u8 labels[count] when has_labels.
struct SampleSet {
  std::size_t length = 0;
  std::vector<std::vector<double>> samples;
  std::optional<std::vector<std::uint8_t>> labels;

  std::size_t size() const { return samples.size(); }
};

SampleSet read_samples(std::istream& in);
SampleSet read_samples(const std::filesystem::path& path);
void write_samples(std::ostream& out, const SampleSet& set);
void write_samples(const std::filesystem::path& path, const SampleSet& set);

}  // namespace xbar::nn

#include "xbar/nn/weights_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace xbar::nn {

namespace {

constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

void put_f32(std::ostream& out, double value) {
  put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError(std::string("truncated file while reading ") + what);
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

double get_f32(std::istream& in, const char* what) {
  return static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, what)));
}

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4] = {};
  in.read(buf, 4);
  if (in.gcount() != 4 || std::memcmp(buf, magic, 4) != 0) {
    throw FormatError(std::string("bad magic, expected ") + magic);
  }
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version != kVersion) {
    throw FormatError(std::string(magic) + ": unsupported version " + std::to_string(version));
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

}  // namespace

NetworkParams read_weights(std::istream& in) {
  expect_magic(in, "MXW1");
  const auto count = get_le<std::uint16_t>(in, "layer_count");
  NetworkParams params;
  for (std::uint16_t l = 0; l < count; ++l) {
    LayerParams layer;
    const auto name_len = get_le<std::uint8_t>(in, "name_len");
    layer.name.resize(name_len);
    in.read(layer.name.data(), name_len);
    if (in.gcount() != name_len) throw FormatError("truncated layer name");
    const auto rank = get_le<std::uint8_t>(in, "rank");
    std::size_t total = rank == 0 ? 0 : 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
      layer.dims.push_back(get_le<std::uint32_t>(in, "dims"));
      total *= layer.dims.back();
    }
    layer.weights.resize(total);
    for (auto& w : layer.weights) w = get_f32(in, "weights");
    const auto bias_len = get_le<std::uint32_t>(in, "bias_len");
    layer.bias.resize(bias_len);
    for (auto& b : layer.bias) b = get_f32(in, "bias");
    params.layers.push_back(std::move(layer));
  }
  return params;
}

NetworkParams read_weights(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_weights(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_weights(std::ostream& out, const NetworkParams& params) {
  out.write("MXW1", 4);
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    if (layer.name.size() > 255) throw FormatError("layer name too long: " + layer.name);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(layer.name.size()));
    out.write(layer.name.data(), static_cast<std::streamsize>(layer.name.size()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(layer.dims.size()));
    for (auto d : layer.dims) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double w : layer.weights) put_f32(out, w);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.bias.size()));
    for (double b : layer.bias) put_f32(out, b);
  }
  if (!out) throw FormatError("write failed");
}

void write_weights(const std::filesystem::path& path, const NetworkParams& params) {
  auto out = open_out(path);
  write_weights(out, params);
}

NetworkSpec infer_spec(const NetworkParams& params) {
  std::vector<const LayerParams*> convs;
  std::vector<const LayerParams*> fcs;
  for (const auto& l : params.layers) {
    if (l.name.rfind("conv", 0) == 0) {
      if (l.dims.size() != 3) throw SpecError("layer " + l.name + ": conv weights must be rank 3");
      convs.push_back(&l);
    } else if (l.name.rfind("fc", 0) == 0) {
      if (l.dims.size() != 2) throw SpecError("layer " + l.name + ": fc weights must be rank 2");
      fcs.push_back(&l);
    } else {
      throw SpecError("unknown layer " + l.name);
    }
  }
  if (fcs.empty()) throw SpecError("weights contain no fully connected layer");

  const bool parallel = convs.size() != 1;
  if (parallel && convs.size() % 2 != 0) {
    throw SpecError("layer " + convs.back()->name + ": unpaired parallel conv branch");
  }
  std::size_t m = fcs.front()->dims[0];
  std::size_t n = 2;
  std::vector<std::size_t> alpha;
  if (!convs.empty()) {
    n = 2 * convs.front()->dims[0];
    m = parallel ? convs[0]->dims[2] + convs[1]->dims[2] + 2 : convs[0]->dims[2] + 1;
    for (std::size_t i = 0; i < convs.size(); i += parallel ? 2 : 1) alpha.push_back(convs[i]->dims[2]);
  }
  std::vector<std::size_t> beta;
  for (std::size_t d = 0; d + 1 < fcs.size(); ++d) beta.push_back(fcs[d]->dims[1]);
  if (fcs.back()->dims[1] != 2) {
    throw SpecError("layer " + fcs.back()->name + ": final layer must have 2 outputs");
  }
  NetworkSpec spec = build_network_architecture(m, n, parallel ? convs.size() / 2 : convs.size(),
                                                fcs.size(), alpha, beta, parallel);
  validate_params(spec, params);
  return spec;
}

SampleSet read_samples(std::istream& in) {
  expect_magic(in, "MXI1");
  SampleSet set;
  const auto count = get_le<std::uint32_t>(in, "sample_count");
  set.length = get_le<std::uint32_t>(in, "length");
  const auto has_labels = get_le<std::uint8_t>(in, "label flag");
  if (has_labels > 1) throw FormatError("label flag must be 0 or 1");
  set.samples.assign(count, std::vector<double>(set.length));
  for (auto& s : set.samples) {
    for (auto& v : s) v = get_f32(in, "samples");
  }
  if (has_labels) {
    std::vector<std::uint8_t> labels(count);
    for (auto& l : labels) {
      l = get_le<std::uint8_t>(in, "labels");
      if (l > 1) throw FormatError("label outside {0, 1}");
    }
    set.labels = std::move(labels);
  }
  return set;
}

SampleSet read_samples(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_samples(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_samples(std::ostream& out, const SampleSet& set) {
  out.write("MXI1", 4);
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.samples.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.length));
  put_le<std::uint8_t>(out, set.labels ? 1 : 0);
  for (const auto& s : set.samples) {
    if (s.size() != set.length) throw FormatError("sample length mismatch");
    for (double v : s) put_f32(out, v);
  }
  if (set.labels) {
    if (set.labels->size() != set.samples.size()) throw FormatError("label count mismatch");
    for (auto l : *set.labels) put_le<std::uint8_t>(out, l);
  }
  if (!out) throw FormatError("write failed");
}

void write_samples(const std::filesystem::path& path, const SampleSet& set) {
  auto out = open_out(path);
  write_samples(out, set);
}

}  // namespace xbar::nn

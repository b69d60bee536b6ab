#include "xbar/nn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "xbar/nn/layers.hpp"

namespace xbar::nn {

NetworkParams random_params(const NetworkSpec& spec, std::uint64_t seed) {
  NetworkParams params = zero_params(spec);
  std::mt19937_64 rng(seed);
  for (auto& l : params.layers) {
    const double fan_in = static_cast<double>(l.weights.size() / l.bias.size());
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(fan_in));
    for (auto& w : l.weights) w = n(rng);
    for (auto& b : l.bias) b = 0.1 * n(rng);
  }
  return params;
}

SampleSet synthetic_samples(const NetworkSpec& spec, const NetworkParams& params,
                            std::size_t count, std::uint64_t seed, double min_margin) {
  SampleSet set;
  set.length = spec.input_length;
  set.labels.emplace();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.4);
  std::size_t attempts = 0;
  while (set.samples.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw SpecError("synthetic_samples: margin too strict");
    std::vector<double> x(spec.input_length);
    for (auto& v : x) v = std::clamp(g(rng), -1.0, 1.0);
    const auto logits = forward(spec, params, x);
    if (logits.size() != 2) throw SpecError("synthetic_samples: network must have 2 outputs");
    if (std::abs(logits[1] - logits[0]) < min_margin) continue;
    set.labels->push_back(static_cast<std::uint8_t>(argmax(logits)));
    set.samples.push_back(std::move(x));
  }
  return set;
}

}  // namespace xbar::nn

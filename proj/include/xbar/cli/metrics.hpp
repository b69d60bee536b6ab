#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "json.hpp"

namespace xbar::cli {

// Class 1 is the positive (seizure) class.
struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const { return tp + tn + fp + fn; }
};

struct Metrics {
  Confusion confusion;
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::optional<double> fp_per_hour;
  double auroc = 0.0;
};

Confusion confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> labels);

// Mann-Whitney U / (n_pos * n_neg), ties counted one half. 0.5 when a class
// is absent.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// score = logit1 - logit0; hours <= 0 leaves fp_per_hour empty.
Metrics compute_metrics(std::span<const std::uint8_t> predicted, std::span<const double> scores,
                        std::span<const std::uint8_t> labels, double hours = 0.0);

nlohmann::json to_json(const Metrics& m);

}  // namespace xbar::cli

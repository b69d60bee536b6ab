#include "xbar/cli/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace xbar::cli {

Confusion confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("confusion: size mismatch");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predicted[i] != 0, y = labels[i] != 0;
    if (p && y) ++c.tp;
    else if (!p && !y) ++c.tn;
    else if (p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auroc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Midranks over tied groups.
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos_ranks = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i]) {
      pos_ranks += rank[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const double u = pos_ranks - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Metrics compute_metrics(std::span<const std::uint8_t> predicted, std::span<const double> scores,
                        std::span<const std::uint8_t> labels, double hours) {
  Metrics m;
  m.confusion = confusion(predicted, labels);
  const auto& c = m.confusion;
  auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  if (hours > 0.0) m.fp_per_hour = static_cast<double>(c.fp) / hours;
  m.auroc = auroc(scores, labels);
  return m;
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::json j = {{"samples", m.confusion.total()},
                      {"tp", m.confusion.tp},
                      {"tn", m.confusion.tn},
                      {"fp", m.confusion.fp},
                      {"fn", m.confusion.fn},
                      {"accuracy", m.accuracy},
                      {"sensitivity", m.sensitivity},
                      {"specificity", m.specificity},
                      {"auroc", m.auroc}};
  j["fp_per_hour"] = m.fp_per_hour ? nlohmann::json(*m.fp_per_hour) : nlohmann::json(nullptr);
  return j;
}

}  // namespace xbar::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace xbar::crossbar {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bit counts of 0 mean infinite resolution (converter or write quantization
// disabled).
struct NonIdealityConfig {
  unsigned dac_bits = 6;
  unsigned adc_bits = 6;
  unsigned write_bits = 0;
  double write_sigma = 0.0;
  double p_stuck_on = 0.0;
  double p_stuck_off = 0.0;
  double r_line = 2.0;
  double r_source = 20.0;
  double g_window_scale = 1.0;
  double v_max = 0.3;
  std::uint64_t rng_seed = 0;

  // Every non-ideality off; v_max kept.
  static NonIdealityConfig ideal();

  void validate() const;
  // Sweepable knobs by JSON field name.
  static const std::vector<std::string>& field_names();
  void set(std::string_view field, double value);
  double get(std::string_view field) const;
};

nlohmann::json to_json(const NonIdealityConfig& cfg);
// Absent keys take defaults; unknown keys and wrong types are rejected.
NonIdealityConfig config_from_json(const nlohmann::json& j);
NonIdealityConfig load_config(const std::filesystem::path& path);

}  // namespace xbar::crossbar

#include "xbar/crossbar/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace xbar::crossbar {

NonIdealityConfig NonIdealityConfig::ideal() {
  NonIdealityConfig c;
  c.dac_bits = c.adc_bits = c.write_bits = 0;
  c.r_line = c.r_source = 0.0;
  return c;
}

void NonIdealityConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
  };
  prob(p_stuck_on, "p_stuck_on");
  prob(p_stuck_off, "p_stuck_off");
  if (p_stuck_on + p_stuck_off > 1.0 + 1e-12) {
    throw ConfigError("p_stuck_on + p_stuck_off must be <= 1");
  }
  if (!(r_line >= 0.0) || !std::isfinite(r_line)) throw ConfigError("r_line must be >= 0");
  if (!(r_source >= 0.0) || !std::isfinite(r_source)) throw ConfigError("r_source must be >= 0");
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("v_max must be > 0");
  if (!(write_sigma >= 0.0) || !std::isfinite(write_sigma)) {
    throw ConfigError("write_sigma must be >= 0");
  }
  if (!(g_window_scale > 0.0) || !std::isfinite(g_window_scale)) {
    throw ConfigError("g_window_scale must be > 0");
  }
  for (unsigned b : {dac_bits, adc_bits, write_bits}) {
    if (b > 30) throw ConfigError("converter/write bits must be <= 30");
  }
}

const std::vector<std::string>& NonIdealityConfig::field_names() {
  static const std::vector<std::string> names = {
      "dac_bits",    "adc_bits",    "write_bits", "write_sigma",    "p_stuck_on", "p_stuck_off",
      "r_line",      "r_source",    "g_window_scale", "v_max",      "rng_seed"};
  return names;
}

namespace {

unsigned as_bits(std::string_view field, double v) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 30) {
    throw ConfigError(std::string(field) + " must be a non-negative integer <= 30");
  }
  return static_cast<unsigned>(v);
}

}  // namespace

void NonIdealityConfig::set(std::string_view field, double value) {
  if (field == "dac_bits") dac_bits = as_bits(field, value);
  else if (field == "adc_bits") adc_bits = as_bits(field, value);
  else if (field == "write_bits") write_bits = as_bits(field, value);
  else if (field == "write_sigma") write_sigma = value;
  else if (field == "p_stuck_on") p_stuck_on = value;
  else if (field == "p_stuck_off") p_stuck_off = value;
  else if (field == "r_line") r_line = value;
  else if (field == "r_source") r_source = value;
  else if (field == "g_window_scale") g_window_scale = value;
  else if (field == "v_max") v_max = value;
  else if (field == "rng_seed") {
    if (!(value >= 0.0) || value != std::floor(value)) throw ConfigError("rng_seed must be >= 0");
    rng_seed = static_cast<std::uint64_t>(value);
  } else {
    throw ConfigError("unknown knob '" + std::string(field) + "'");
  }
}

double NonIdealityConfig::get(std::string_view field) const {
  if (field == "dac_bits") return dac_bits;
  if (field == "adc_bits") return adc_bits;
  if (field == "write_bits") return write_bits;
  if (field == "write_sigma") return write_sigma;
  if (field == "p_stuck_on") return p_stuck_on;
  if (field == "p_stuck_off") return p_stuck_off;
  if (field == "r_line") return r_line;
  if (field == "r_source") return r_source;
  if (field == "g_window_scale") return g_window_scale;
  if (field == "v_max") return v_max;
  if (field == "rng_seed") return static_cast<double>(rng_seed);
  throw ConfigError("unknown knob '" + std::string(field) + "'");
}

nlohmann::json to_json(const NonIdealityConfig& c) {
  return {{"dac_bits", c.dac_bits},       {"adc_bits", c.adc_bits},
          {"write_bits", c.write_bits},   {"write_sigma", c.write_sigma},
          {"p_stuck_on", c.p_stuck_on},   {"p_stuck_off", c.p_stuck_off},
          {"r_line", c.r_line},           {"r_source", c.r_source},
          {"g_window_scale", c.g_window_scale}, {"v_max", c.v_max},
          {"rng_seed", c.rng_seed}};
}

NonIdealityConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("non-ideality config must be a JSON object");
  NonIdealityConfig c;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("config field '" + key + "' must be a number");
    if (key == "rng_seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        throw ConfigError("rng_seed must be a non-negative integer");
      }
      c.rng_seed = value.get<std::uint64_t>();
      continue;
    }
    c.set(key, value.get<double>());
  }
  c.validate();
  return c;
}

NonIdealityConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace xbar::crossbar

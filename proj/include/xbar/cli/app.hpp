#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xbar::cli {

struct RunConfig {
  std::filesystem::path weights;
  std::filesystem::path inputs;
  std::filesystem::path config;       // NonIdealityConfig JSON; empty = defaults
  std::filesystem::path cost_table;   // component override JSON
  std::filesystem::path out = ".";
  std::string scheme = "stationary";
  std::string variant = "tdm";
  std::string scenario = "mid";
  std::string adc_range = "calibrated";
  std::string power_mode = "worst";
  std::string knob;
  std::vector<double> values;
  std::vector<double> stuck_rates = {0.01, 0.05, 0.10};
  std::optional<std::uint64_t> seed;  // first seed; sweeps default to 5
  std::size_t trials = 5;             // seeds seed .. seed + trials - 1
  std::size_t count = 200;            // synth sample count
  std::size_t tile_budget = 1024;
  std::size_t threads = 0;
  double hours = 0.0;
  bool ideal = false;
  bool baseline = false;
};

void cmd_infer(const RunConfig& rc);
void cmd_sweep(const RunConfig& rc);
void cmd_cost(const RunConfig& rc);
void cmd_plan(const RunConfig& rc);
void cmd_mitigate(const RunConfig& rc);
void cmd_synth(const RunConfig& rc);

// Parses arguments and dispatches; errors go to stderr, returns the exit code.
int run(int argc, const char* const* argv);

}  // namespace xbar::cli

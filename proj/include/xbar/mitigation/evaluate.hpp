#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xbar/crossbar/config.hpp"
#include "xbar/crossbar/engine.hpp"
#include "xbar/mapping/plan.hpp"
#include "xbar/mitigation/offset.hpp"
#include "xbar/nn/network.hpp"
#include "xbar/nn/weights_io.hpp"

namespace xbar::mitigation {

enum class Repair { None, Offset, Baseline };

std::string to_string(Repair r);

struct MitigationOptions {
  std::vector<double> stuck_rates = {0.01, 0.05, 0.10};
  std::vector<std::uint64_t> seeds = {5, 6, 7, 8, 9};
  std::vector<Repair> modes = {Repair::None, Repair::Offset};
  crossbar::NonIdealityConfig base;  // p_stuck_* and rng_seed are overwritten
  crossbar::ExecutionOptions exec;
  mapping::Scheme scheme = mapping::Scheme::WeightStationary;
  bool calibrate_dac = true;  // input full scale from the sample set
  std::size_t threads = 0;    // 0: hardware concurrency
};

struct MitigationRow {
  double stuck_rate = 0.0;
  std::uint64_t seed = 0;
  Repair mode = Repair::None;
  double accuracy = 0.0;
  double mean_weight_error = 0.0;  // mean |programmed - target| over placements
  RepairReport report;             // empty for Repair::None
};

// One row per (rate, seed, mode), in that nesting order. A total stuck rate
// r is split evenly between stuck-on and stuck-off.
std::vector<MitigationRow> evaluate_mitigation(const nn::NetworkSpec& spec,
                                               const nn::NetworkParams& params,
                                               const nn::SampleSet& samples,
                                               const MitigationOptions& options = {});

// stuck_rate,seed,mitigated,accuracy,mean_weight_error
std::string to_csv(const std::vector<MitigationRow>& rows);

// Mean accuracy per (rate, mode) over seeds.
struct MitigationSummary {
  double stuck_rate = 0.0;
  Repair mode = Repair::None;
  double mean_accuracy = 0.0;
  double mean_weight_error = 0.0;
};
std::vector<MitigationSummary> summarize(const std::vector<MitigationRow>& rows);

}  // namespace xbar::mitigation

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xbar/crossbar/config.hpp"
#include "xbar/crossbar/device.hpp"
#include "xbar/crossbar/vmm.hpp"
#include "xbar/mapping/plan.hpp"

namespace xbar::crossbar {

struct ReadoutResult {
  std::vector<double> currents;       // per column, as sensed
  std::vector<std::uint32_t> codes;   // per column; empty when adc_bits = 0
  std::vector<double> outputs;        // per pair, weight domain
};

// Pair j uses columns (col_offset + 2j, col_offset + 2j + 1). outputs[j] =
// (I+ - I-) / (scale * v_per_unit) after ADC sampling of each column.
ReadoutResult differential_readout(std::span<const double> currents, std::size_t col_offset,
                                   std::size_t pairs, double scale, double v_per_unit,
                                   unsigned adc_bits, double full_scale);

enum class AdcRange { WorstCase, Calibrated };

struct ExecutionOptions {
  NodalOptions nodal;
  // WorstCase: 64 * G_on * v_max on every tile (or adc_full_scale when > 0).
  // Calibrated: per tile, the largest |column current| seen by
  // calibrate_adc().
  AdcRange adc_range = AdcRange::WorstCase;
  double adc_full_scale = 0.0;
};

// Programmed tiles bound to a plan. The nodal network of each tile is
// factorized once at construction when wire resistance is enabled.
class Accelerator {
 public:
  Accelerator(mapping::MappingPlan plan, std::vector<CrossbarTile> tiles, NonIdealityConfig cfg,
              ExecutionOptions options = {});

  std::vector<double> forward(std::span<const double> input) const;
  // One parameter layer on the crossbar; input/output channel-major for conv.
  std::vector<double> run_layer(const std::string& name, std::span<const double> input) const;

  const mapping::MappingPlan& plan() const { return plan_; }
  const std::vector<CrossbarTile>& tiles() const { return tiles_; }
  const NonIdealityConfig& config() const { return cfg_; }
  double adc_full_scale(std::size_t tile) const;
  // Records per-tile peak |current| with the ADC bypassed. Only consulted
  // under AdcRange::Calibrated.
  void calibrate_adc(std::span<const std::vector<double>> inputs);

 private:
  std::vector<double> forward_impl(std::span<const double> input, std::vector<double>* peaks) const;
  std::vector<double> run_layer(const mapping::LayerPlan& layer, std::span<const double> input,
                                std::vector<double>* peaks) const;
  std::vector<double> tile_currents(std::size_t tile, std::span<const double> v) const;

  mapping::MappingPlan plan_;
  std::vector<CrossbarTile> tiles_;
  NonIdealityConfig cfg_;
  ExecutionOptions options_;
  std::vector<std::optional<NodalSolver>> solvers_;
  std::vector<double> calibrated_fs_;
};

std::vector<double> execute_network(const mapping::MappingPlan& plan,
                                    std::span<const CrossbarTile> tiles,
                                    std::span<const double> input, const NonIdealityConfig& cfg,
                                    const ExecutionOptions& options = {});

}  // namespace xbar::crossbar

#pragma once

#include <span>
#include <vector>

#include "xbar/mapping/plan.hpp"
#include "xbar/nn/network.hpp"

namespace xbar::mapping {

// Conductance image of one tile: row-major kTileRows x kTileCols, plus the
// siemens-per-unit-weight scale shared by every pair on the tile.
struct TileImage {
  std::vector<double> g = std::vector<double>(kTileRows * kTileCols, kGOff);
  double scale = 1.0;

  double& at(std::size_t r, std::size_t c) { return g[r * kTileCols + c]; }
  double at(std::size_t r, std::size_t c) const { return g[r * kTileCols + c]; }
};

// Value a placement encodes: the weight itself, or bias / input_full_scale
// for bias cells (the bias row is driven at full scale).
double cell_value(const LayerPlan& layer, const nn::LayerParams& params, std::size_t index);

// Per-tile scale = window span / max |cell value| on the tile.
std::vector<TileImage> compute_targets(const MappingPlan& plan, const nn::NetworkParams& params,
                                       const ConductanceWindow& window = {});

// Reads every layer back from conductances (first copy of staggered replicas).
nn::NetworkParams decompile(const MappingPlan& plan, std::span<const TileImage> tiles);


// Sets every layer's input full scale to the largest |input| the float
// reference sees over the given samples (layers never excited keep theirs).
void calibrate_input_full_scale(MappingPlan& plan, const nn::NetworkParams& params,
                                std::span<const std::vector<double>> inputs);

}  // namespace xbar::mapping

#include "xbar/mapping/targets.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "xbar/nn/layers.hpp"

namespace xbar::mapping {

double cell_value(const LayerPlan& layer, const nn::LayerParams& params, std::size_t index) {
  const std::size_t w = layer.weight_count();
  if (index < w) return params.weights[index];
  return params.bias[index - w] / layer.input_full_scale;
}

std::vector<TileImage> compute_targets(const MappingPlan& plan, const nn::NetworkParams& params,
                                       const ConductanceWindow& window) {
  std::vector<TileImage> tiles(plan.tile_count());
  for (auto& t : tiles) std::fill(t.g.begin(), t.g.end(), window.g_off);

  std::vector<double> peak(plan.tile_count(), 0.0);
  std::vector<std::vector<Placement>> per_layer;
  for (const auto& layer : plan.layers) {
    const auto& p = params.at(layer.layer);
    per_layer.push_back(placements(layer));
    for (const auto& pl : per_layer.back()) {
      peak[pl.tile] = std::max(peak[pl.tile], std::abs(cell_value(layer, p, pl.index)));
    }
  }
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    tiles[t].scale = window.span() / (peak[t] > 0.0 ? peak[t] : 1.0);
  }
  for (std::size_t l = 0; l < plan.layers.size(); ++l) {
    const auto& layer = plan.layers[l];
    const auto& p = params.at(layer.layer);
    for (const auto& pl : per_layer[l]) {
      auto& img = tiles[pl.tile];
      const auto pair = map_weight_to_pair(cell_value(layer, p, pl.index), img.scale, window);
      img.at(pl.row, pl.col_plus) = pair.g_plus;
      img.at(pl.row, pl.col_minus) = pair.g_minus;
    }
  }
  return tiles;
}

nn::NetworkParams decompile(const MappingPlan& plan, std::span<const TileImage> tiles) {
  if (tiles.size() != plan.tile_count()) {
    throw MappingError("decompile: " + std::to_string(tiles.size()) + " tiles for a " +
                       std::to_string(plan.tile_count()) + "-tile plan");
  }
  nn::NetworkParams out = nn::zero_params(plan.spec);
  for (const auto& layer : plan.layers) {
    auto& p = out.at(layer.layer);
    const std::size_t w = layer.weight_count();
    std::vector<bool> seen(w + p.bias.size(), false);
    for (const auto& pl : placements(layer)) {
      if (seen[pl.index]) continue;
      seen[pl.index] = true;
      const auto& img = tiles[pl.tile];
      const double v =
          recover_weight({img.at(pl.row, pl.col_plus), img.at(pl.row, pl.col_minus)}, img.scale);
      if (pl.index < w) {
        p.weights[pl.index] = v;
      } else {
        p.bias[pl.index - w] = v * layer.input_full_scale;
      }
    }
  }
  return out;
}


void calibrate_input_full_scale(MappingPlan& plan, const nn::NetworkParams& params,
                                std::span<const std::vector<double>> inputs) {
  const auto& spec = plan.spec;
  std::vector<double> peak(plan.layers.size(), 0.0);
  auto bump = [&](const std::string& name, std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    for (std::size_t l = 0; l < plan.layers.size(); ++l) {
      if (plan.layers[l].layer == name) peak[l] = std::max(peak[l], m);
    }
  };
  for (const auto& sample : inputs) {
    const auto trace = nn::forward_trace(spec, params, sample);
    std::vector<double> block_in = sample;
    std::size_t branch = 0;
    for (const auto& block : spec.blocks) {
      std::vector<nn::FeatureMap> pooled;
      for (const auto& conv : block.branches) {
        bump(conv.name, block_in);
        pooled.push_back(nn::avgpool1d(trace.branch_outputs[branch++], block.pool.kernel_size,
                                       block.pool.stride));
      }
      block_in = nn::concat_channels(pooled).data;
    }
    for (std::size_t d = 0; d < spec.dense.size(); ++d) bump(spec.dense[d].name, trace.dense_inputs[d]);
  }
  for (std::size_t l = 0; l < plan.layers.size(); ++l) {
    if (peak[l] > 0.0) plan.layers[l].input_full_scale = peak[l];
  }
}

}  // namespace xbar::mapping

#include "xbar/crossbar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "xbar/crossbar/convert.hpp"
#include "xbar/nn/layers.hpp"

namespace xbar::crossbar {

ReadoutResult differential_readout(std::span<const double> currents, std::size_t col_offset,
                                   std::size_t pairs, double scale, double v_per_unit,
                                   unsigned adc_bits, double full_scale) {
  ReadoutResult r;
  r.currents.assign(currents.begin() + static_cast<std::ptrdiff_t>(col_offset),
                    currents.begin() + static_cast<std::ptrdiff_t>(col_offset + 2 * pairs));
  if (adc_bits > 0) r.codes = adc_convert(r.currents, adc_bits, full_scale);
  r.outputs.resize(pairs);
  for (std::size_t j = 0; j < pairs; ++j) {
    double ip = r.currents[2 * j];
    double im = r.currents[2 * j + 1];
    if (adc_bits > 0) {
      ip = adc_level(r.codes[2 * j], adc_bits, full_scale);
      im = adc_level(r.codes[2 * j + 1], adc_bits, full_scale);
    }
    r.outputs[j] = (ip - im) / (scale * v_per_unit);
  }
  return r;
}

Accelerator::Accelerator(mapping::MappingPlan plan, std::vector<CrossbarTile> tiles,
                         NonIdealityConfig cfg, ExecutionOptions options)
    : plan_(std::move(plan)), tiles_(std::move(tiles)), cfg_(cfg), options_(options) {
  cfg_.validate();
  if (tiles_.size() != plan_.tile_count()) {
    throw mapping::MappingError("schedule/tile mismatch: plan has " +
                                std::to_string(plan_.tile_count()) + " tiles, got " +
                                std::to_string(tiles_.size()));
  }
  solvers_.resize(tiles_.size());
  if (cfg_.r_line > 0.0 || cfg_.r_source > 0.0) {
    for (std::size_t t = 0; t < tiles_.size(); ++t) {
      solvers_[t].emplace(tiles_[t], cfg_.r_line, cfg_.r_source, options_.nodal);
    }
  }
}

double Accelerator::adc_full_scale(std::size_t tile) const {
  if (options_.adc_range == AdcRange::Calibrated && tile < calibrated_fs_.size() &&
      calibrated_fs_[tile] > 0.0) {
    return calibrated_fs_[tile];
  }
  if (options_.adc_full_scale > 0.0) return options_.adc_full_scale;
  return static_cast<double>(CrossbarTile::rows) * mapping::kGOn * cfg_.v_max;
}

void Accelerator::calibrate_adc(std::span<const std::vector<double>> inputs) {
  std::vector<double> peaks(tiles_.size(), 0.0);
  for (const auto& x : inputs) forward_impl(x, &peaks);
  calibrated_fs_ = std::move(peaks);
}

std::vector<double> Accelerator::tile_currents(std::size_t tile, std::span<const double> v) const {
  if (solvers_[tile]) return solvers_[tile]->solve(v);
  return vmm_ideal(tiles_[tile], v, cfg_.v_max);
}

std::vector<double> Accelerator::run_layer(const mapping::LayerPlan& layer,
                                           std::span<const double> input,
                                           std::vector<double>* peaks) const {
  using mapping::LayerRole;
  const std::size_t n_out = layer.role == LayerRole::Dense
                                ? layer.out_features
                                : layer.conv.n_filters * layer.conv.positions();
  const std::size_t n_in = layer.role == LayerRole::Dense
                               ? layer.in_features
                               : layer.conv.in_channels * layer.conv.input_len;
  if (input.size() != n_in) {
    throw mapping::MappingError(layer.layer + ": input length " + std::to_string(input.size()) +
                                " != " + std::to_string(n_in));
  }
  std::vector<double> out(n_out, 0.0);
  const double xfs = layer.input_full_scale;
  const double v_per_unit = cfg_.v_max / xfs;
  const unsigned adc_bits = peaks ? 0u : cfg_.adc_bits;

  std::vector<double> normalized(input.size());
  std::transform(input.begin(), input.end(), normalized.begin(), [&](double x) { return x / xfs; });
  const std::vector<double> volts = dac_convert(normalized, cfg_.dac_bits, cfg_.v_max);
  const double bias_volts = dac_convert(std::vector<double>{1.0}, cfg_.dac_bits, cfg_.v_max)[0];

  for (std::size_t pass = 0; pass < layer.passes(); ++pass) {
    std::map<std::size_t, std::vector<const mapping::Section*>> by_tile;
    for (const auto& s : layer.sections) {
      if (layer.section_active(s, pass)) by_tile[s.tile].push_back(&s);
    }
    for (const auto& [tile, secs] : by_tile) {
      std::vector<double> v(CrossbarTile::rows, 0.0);
      for (const auto* s : secs) {
        for (std::size_t i = 0; i < s->row_map.size(); ++i) {
          const auto src = layer.row_input(pass, s->row_begin + i);
          if (src == mapping::kBiasInput) {
            v[s->row_map[i]] = bias_volts;
          } else if (src >= 0) {
            v[s->row_map[i]] = volts[static_cast<std::size_t>(src)];
          }
        }
      }
      const auto currents = tile_currents(tile, v);
      if (peaks) {
        for (double i : currents) (*peaks)[tile] = std::max((*peaks)[tile], std::abs(i));
      }
      const double fs = adc_full_scale(tile);
      // Sections sharing columns in one activation are read once.
      std::map<std::pair<std::size_t, std::size_t>, bool> read;
      for (const auto* s : secs) {
        if (!read.emplace(std::pair{s->col_offset, s->col_begin}, true).second) continue;
        const auto r = differential_readout(currents, s->col_offset, s->pairs, tiles_[tile].scale,
                                            v_per_unit, adc_bits, fs);
        for (std::size_t j = 0; j < s->pairs; ++j) {
          out[layer.col_output(pass, s->col_begin + j)] += r.outputs[j];
        }
      }
    }
  }
  return out;
}

std::vector<double> Accelerator::run_layer(const std::string& name,
                                           std::span<const double> input) const {
  return run_layer(plan_.layer(name), input, nullptr);
}

std::vector<double> Accelerator::forward(std::span<const double> input) const {
  return forward_impl(input, nullptr);
}

std::vector<double> Accelerator::forward_impl(std::span<const double> input,
                                              std::vector<double>* peaks) const {
  const auto& spec = plan_.spec;
  if (input.size() != spec.input_length) {
    throw mapping::MappingError("input length " + std::to_string(input.size()) + " != " +
                                std::to_string(spec.input_length));
  }
  std::vector<double> x(input.begin(), input.end());
  for (const auto& block : spec.blocks) {
    std::vector<nn::FeatureMap> pooled;
    for (const auto& conv : block.branches) {
      nn::FeatureMap y(conv.out_channels, conv.output_length());
      y.data = run_layer(plan_.layer(conv.name), x, peaks);
      pooled.push_back(nn::avgpool1d(y, block.pool.kernel_size, block.pool.stride));
    }
    x = nn::concat_channels(pooled).data;
  }
  for (std::size_t d = 0; d < spec.dense.size(); ++d) {
    x = run_layer(plan_.layer(spec.dense[d].name), x, peaks);
    if (d + 1 < spec.dense.size()) x = nn::relu(x);
  }
  return x;
}

std::vector<double> execute_network(const mapping::MappingPlan& plan,
                                    std::span<const CrossbarTile> tiles,
                                    std::span<const double> input, const NonIdealityConfig& cfg,
                                    const ExecutionOptions& options) {
  Accelerator acc(plan, std::vector<CrossbarTile>(tiles.begin(), tiles.end()), cfg, options);
  return acc.forward(input);
}

}  // namespace xbar::crossbar

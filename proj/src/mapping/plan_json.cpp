#include "xbar/mapping/plan_json.hpp"

namespace xbar::mapping {

nlohmann::json budget_to_json(const CellBudget& b) {
  return {{"cells_used", b.cells_used},
          {"cells_used_incl_sparsity", b.cells_used_incl_sparsity},
          {"pass_count", b.pass_count}};
}

nlohmann::json plan_to_json(const MappingPlan& plan) {
  nlohmann::json j;
  j["scheme"] = std::string(to_string(plan.scheme));
  j["tile_size"] = {kTileRows, kTileCols};
  j["bias_rows"] = {kBiasRow, kBiasRow + 1};

  auto tiles = nlohmann::json::array();
  for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
    tiles.push_back({{"id", t}, {"layers", plan.tiles[t].layers},
                     {"conv_tile", plan.tiles[t].conv_tile}});
  }
  j["tiles"] = std::move(tiles);

  auto layers = nlohmann::json::array();
  for (const auto& l : plan.layers) {
    nlohmann::json lj;
    lj["name"] = l.layer;
    lj["role"] = l.role == LayerRole::Conv ? "conv" : "dense";
    if (l.role == LayerRole::Conv) {
      lj["scheme"] = std::string(to_string(l.scheme));
      lj["filters"] = l.conv.n_filters;
      lj["in_channels"] = l.conv.in_channels;
      lj["kernel"] = l.conv.kernel_len;
      lj["input_len"] = l.conv.input_len;
      lj["padding"] = {l.conv.pad_left, l.conv.pad_right};
    } else {
      lj["in_features"] = l.in_features;
      lj["out_features"] = l.out_features;
    }
    lj["input_full_scale"] = l.input_full_scale;
    lj["budget"] = budget_to_json(l.budget);
    auto secs = nlohmann::json::array();
    for (const auto& s : l.sections) {
      secs.push_back({{"tile", s.tile}, {"row_begin", s.row_begin}, {"rows", s.row_map},
                      {"col_begin", s.col_begin}, {"pairs", s.pairs},
                      {"col_offset", s.col_offset}, {"pass", s.pass}});
    }
    lj["sections"] = std::move(secs);
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);

  auto schedule = nlohmann::json::array();
  for (const auto& l : plan.layers) {
    nlohmann::json windows = nlohmann::json::array();
    if (l.role == LayerRole::Conv && l.scheme == Scheme::WeightStationary) {
      for (std::size_t p = 0; p < l.passes(); ++p) {
        windows.push_back({static_cast<long long>(p) - static_cast<long long>(l.conv.pad_left),
                           static_cast<long long>(p + l.conv.kernel_len) -
                               static_cast<long long>(l.conv.pad_left)});
      }
    }
    schedule.push_back({{"layer", l.layer}, {"passes", l.passes()}, {"input_windows", windows}});
  }
  j["pass_schedule"] = std::move(schedule);

  auto pl = nlohmann::json::array();
  for (const auto& p : placements(plan)) {
    pl.push_back({p.layer, p.index, p.copy, p.tile, p.row, p.col_plus, p.col_minus});
  }
  j["placement_fields"] = {"layer", "index", "copy", "tile", "row", "col_plus", "col_minus"};
  j["placements"] = std::move(pl);
  j["cells_used"] = plan.cells_used();
  j["tile_count"] = plan.tile_count();
  return j;
}

}  // namespace xbar::mapping

#include "xbar/mapping/plan.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

namespace xbar::mapping {

DifferentialPair map_weight_to_pair(double w, double scale, const ConductanceWindow& window) {
  if (!(scale > 0.0) || !std::isfinite(w)) {
    throw MappingError("map_weight_to_pair: bad weight or scale");
  }
  double dg = std::abs(w) * scale;
  const double span = window.span();
  if (dg > span * (1.0 + 1e-12)) {
    throw MappingError("weight " + std::to_string(w) + " exceeds conductance window at scale " +
                       std::to_string(scale));
  }
  dg = std::min(dg, span);
  if (w >= 0.0) return {window.g_off + dg, window.g_off};
  return {window.g_off, window.g_off + dg};
}

double recover_weight(const DifferentialPair& pair, double scale) {
  return (pair.g_plus - pair.g_minus) / scale;
}

std::string_view to_string(Scheme s) {
  return s == Scheme::Staggered ? "staggered" : "stationary";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "staggered" || s == "a") return Scheme::Staggered;
  if (s == "stationary" || s == "weight-stationary" || s == "b") return Scheme::WeightStationary;
  throw MappingError("unknown mapping scheme '" + std::string(s) + "'");
}

std::size_t ConvGeometry::positions() const {
  if (kernel_len < 1 || padded_len() < kernel_len) {
    throw MappingError("non-positive output positions (kernel " + std::to_string(kernel_len) +
                       ", padded input " + std::to_string(padded_len()) + ")");
  }
  return padded_len() - kernel_len + 1;
}

// ---- LayerPlan -----------------------------------------------------------

std::size_t LayerPlan::logical_rows() const {
  if (role == LayerRole::Dense) return in_features + 1;
  const std::size_t data = scheme == Scheme::WeightStationary
                               ? conv.in_channels * conv.kernel_len
                               : conv.in_channels * conv.padded_len();
  return data + (conv.bias ? 1 : 0);
}

std::size_t LayerPlan::logical_cols() const {
  if (role == LayerRole::Dense) return out_features;
  return scheme == Scheme::WeightStationary ? conv.n_filters
                                            : conv.n_filters * conv.positions();
}

std::size_t LayerPlan::weight_count() const {
  if (role == LayerRole::Dense) return in_features * out_features;
  return conv.n_filters * conv.in_channels * conv.kernel_len;
}

std::size_t LayerPlan::passes() const {
  if (role == LayerRole::Conv) {
    return scheme == Scheme::WeightStationary ? conv.positions() : 1;
  }
  std::size_t n = 0;
  for (const auto& s : sections) n = std::max(n, s.pass + 1);
  return n;
}

bool LayerPlan::section_active(const Section& s, std::size_t pass) const {
  if (role == LayerRole::Conv && scheme == Scheme::WeightStationary) return true;
  return s.pass == pass;
}

std::ptrdiff_t LayerPlan::row_input(std::size_t pass, std::size_t row) const {
  if (role == LayerRole::Dense) {
    return row < in_features ? static_cast<std::ptrdiff_t>(row) : kBiasInput;
  }
  const std::size_t span = scheme == Scheme::WeightStationary ? conv.kernel_len : conv.padded_len();
  if (row >= conv.in_channels * span) return kBiasInput;
  const std::size_t c = row / span;
  std::size_t u = row % span;
  if (scheme == Scheme::WeightStationary) u += pass;
  if (u < conv.pad_left || u >= conv.pad_left + conv.input_len) return kZeroInput;
  return static_cast<std::ptrdiff_t>(c * conv.input_len + (u - conv.pad_left));
}

std::size_t LayerPlan::col_output(std::size_t pass, std::size_t col) const {
  if (role == LayerRole::Dense) return col;
  const std::size_t P = conv.positions();
  if (scheme == Scheme::WeightStationary) return col * P + pass;
  return (col % conv.n_filters) * P + col / conv.n_filters;
}

std::optional<std::size_t> LayerPlan::param_index(std::size_t row, std::size_t col,
                                                  std::size_t* copy) const {
  if (copy) *copy = 0;
  if (role == LayerRole::Dense) {
    if (row < in_features) return row * out_features + col;
    return weight_count() + col;
  }
  const std::size_t taps = conv.in_channels * conv.kernel_len;
  if (scheme == Scheme::WeightStationary) {
    if (row < taps) return col * taps + row;
    return weight_count() + col;
  }
  const std::size_t f = col % conv.n_filters;
  const std::size_t p = col / conv.n_filters;
  if (copy) *copy = p;
  const std::size_t lp = conv.padded_len();
  if (row >= conv.in_channels * lp) return weight_count() + f;
  const std::size_t c = row / lp;
  const std::size_t u = row % lp;
  if (u < p || u - p >= conv.kernel_len) return std::nullopt;
  return f * taps + c * conv.kernel_len + (u - p);
}

// ---- MappingPlan ---------------------------------------------------------

const LayerPlan& MappingPlan::layer(const std::string& name) const {
  for (const auto& l : layers) {
    if (l.layer == name) return l;
  }
  throw MappingError("plan has no layer " + name);
}

LayerPlan& MappingPlan::layer(const std::string& name) {
  for (auto& l : layers) {
    if (l.layer == name) return l;
  }
  throw MappingError("plan has no layer " + name);
}

std::size_t MappingPlan::cells_used() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.budget.cells_used;
  return n;
}

std::vector<Placement> placements(const LayerPlan& layer) {
  std::vector<Placement> out;
  for (const auto& s : layer.sections) {
    for (std::size_t i = 0; i < s.row_map.size(); ++i) {
      for (std::size_t j = 0; j < s.pairs; ++j) {
        std::size_t copy = 0;
        const auto idx = layer.param_index(s.row_begin + i, s.col_begin + j, &copy);
        if (!idx) continue;
        out.push_back({layer.layer, *idx, copy, s.tile, s.row_map[i], s.col_offset + 2 * j,
                       s.col_offset + 2 * j + 1});
      }
    }
  }
  return out;
}

std::vector<Placement> placements(const MappingPlan& plan) {
  std::vector<Placement> out;
  for (const auto& l : plan.layers) {
    auto p = placements(l);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

void check_placements(const MappingPlan& plan) {
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> used;
  for (const auto& p : placements(plan)) {
    if (p.tile >= plan.tiles.size() || p.row >= kTileRows || p.col_plus >= kTileCols ||
        p.col_minus >= kTileCols) {
      throw MappingError(p.layer + ": placement outside tile bounds");
    }
    for (std::size_t col : {p.col_plus, p.col_minus}) {
      if (!used.insert({p.tile, p.row, col}).second) {
        throw MappingError(p.layer + ": placement collision at tile " + std::to_string(p.tile) +
                           " row " + std::to_string(p.row) + " col " + std::to_string(col));
      }
    }
  }
}

// ---- fragments -----------------------------------------------------------

namespace {

std::vector<std::size_t> iota_rows(std::size_t n, std::size_t first = 0) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = first + i;
  return rows;
}

std::size_t conv_cells(const ConvGeometry& g) {
  return (g.n_filters * g.in_channels * g.kernel_len + (g.bias ? g.n_filters : 0)) * 2;
}

void check_geometry(const ConvGeometry& g, const std::string& name) {
  if (g.n_filters < 1 || g.in_channels < 1 || g.kernel_len < 1 || g.input_len < 1) {
    throw MappingError(name + ": invalid convolution dimensions");
  }
  g.positions();
}

}  // namespace

LayerPlan plan_conv_weight_stationary(const ConvGeometry& g, const std::string& name) {
  check_geometry(g, name);
  const std::size_t taps = g.in_channels * g.kernel_len;
  if (taps > kConvDataRows || g.n_filters > kTilePairs) {
    throw MappingError(name + ": " + std::to_string(taps) + " kernel rows x " +
                       std::to_string(g.n_filters) + " filters exceeds tile (" +
                       std::to_string(kConvDataRows) + " data rows, " +
                       std::to_string(kTilePairs) + " column pairs)");
  }
  LayerPlan plan;
  plan.layer = name;
  plan.role = LayerRole::Conv;
  plan.scheme = Scheme::WeightStationary;
  plan.conv = g;
  Section s;
  s.tile = 0;
  s.row_map = iota_rows(taps);
  if (g.bias) s.row_map.push_back(kBiasRow);
  s.pairs = g.n_filters;
  plan.sections.push_back(std::move(s));
  plan.budget.cells_used = conv_cells(g);
  plan.budget.cells_used_incl_sparsity = plan.budget.cells_used;
  plan.budget.pass_count = g.positions();
  return plan;
}

LayerPlan plan_conv_staggered(const ConvGeometry& g, const std::string& name) {
  check_geometry(g, name);
  const std::size_t P = g.positions();
  const std::size_t lp = g.padded_len();
  const std::size_t data_rows = g.in_channels * lp;
  const std::size_t cols = P * g.n_filters;

  LayerPlan plan;
  plan.layer = name;
  plan.role = LayerRole::Conv;
  plan.scheme = Scheme::Staggered;
  plan.conv = g;

  std::size_t tile = 0;
  for (std::size_t c0 = 0; c0 < cols; c0 += kTilePairs) {
    const std::size_t pairs = std::min(kTilePairs, cols - c0);
    bool bias_placed = !g.bias;
    for (std::size_t r0 = 0; r0 < data_rows; r0 += kConvDataRows) {
      const std::size_t rows = std::min(kConvDataRows, data_rows - r0);
      bool occupied = false;
      for (std::size_t j = c0; j < c0 + pairs && !occupied; ++j) {
        for (std::size_t r = r0; r < r0 + rows && !occupied; ++r) {
          occupied = plan.param_index(r, j).has_value();
        }
      }
      if (!occupied) continue;
      Section s;
      s.tile = tile;
      s.row_begin = r0;
      s.row_map = iota_rows(rows);
      s.col_begin = c0;
      s.pairs = pairs;
      plan.sections.push_back(s);
      if (!bias_placed) {
        s.row_begin = data_rows;
        s.row_map = {kBiasRow};
        plan.sections.push_back(s);
        bias_placed = true;
      }
      ++tile;
    }
  }
  plan.budget.cells_used = P * conv_cells(g);
  plan.budget.cells_used_incl_sparsity = (data_rows + (g.bias ? 1 : 0)) * 2 * cols;
  plan.budget.pass_count = 1;
  return plan;
}

LayerPlan plan_fc(std::size_t in_features, std::size_t out_features, const std::string& name) {
  if (in_features < 1 || out_features < 1) {
    throw MappingError(name + ": fully connected dimensions must be >= 1");
  }
  LayerPlan plan;
  plan.layer = name;
  plan.role = LayerRole::Dense;
  plan.scheme = Scheme::Staggered;
  plan.in_features = in_features;
  plan.out_features = out_features;

  const std::size_t chunk_pairs = std::min(out_features, kTilePairs);
  const std::size_t per_tile = kTilePairs / chunk_pairs;
  const std::size_t total_rows = in_features + 1;  // bias row last

  // Slots are filled column chunk by column chunk; each slot is one section
  // position (tile, horizontal offset) and one activation.
  std::size_t slot = 0;
  auto place = [&](std::size_t row_begin, std::size_t rows, std::size_t c0, std::size_t pairs) {
    Section s;
    s.tile = slot / per_tile;
    s.pass = slot % per_tile;
    s.col_offset = s.pass * 2 * chunk_pairs;
    s.row_begin = row_begin;
    s.row_map = iota_rows(rows);
    s.col_begin = c0;
    s.pairs = pairs;
    plan.sections.push_back(std::move(s));
    ++slot;
  };
  for (std::size_t c0 = 0; c0 < out_features; c0 += chunk_pairs) {
    const std::size_t pairs = std::min(chunk_pairs, out_features - c0);
    for (std::size_t r0 = 0; r0 < total_rows; r0 += kTileRows) {
      place(r0, std::min(kTileRows, total_rows - r0), c0, pairs);
    }
  }
  plan.budget.cells_used = (in_features * out_features + out_features) * 2;
  plan.budget.cells_used_incl_sparsity = plan.budget.cells_used;
  plan.budget.pass_count = plan.passes();
  return plan;
}

SchemeComparison compare_schemes(const ConvGeometry& g) {
  SchemeComparison cmp;
  cmp.staggered = plan_conv_staggered(g).budget;
  cmp.weight_stationary = plan_conv_weight_stationary(g).budget;
  cmp.area_reduction = static_cast<double>(cmp.staggered.cells_used) /
                       static_cast<double>(cmp.weight_stationary.cells_used);
  cmp.computation_increase = static_cast<double>(cmp.weight_stationary.pass_count) /
                             static_cast<double>(cmp.staggered.pass_count);
  cmp.recommendation = cmp.weight_stationary.cells_used < cmp.staggered.cells_used
                           ? Scheme::WeightStationary
                           : Scheme::Staggered;
  return cmp;
}

// ---- whole network -------------------------------------------------------

std::vector<std::pair<std::string, double>> interval_input_bounds(
    const nn::NetworkSpec& spec, const nn::NetworkParams& params) {
  std::vector<std::pair<std::string, double>> out;
  double bound = 1.0;
  for (const auto& block : spec.blocks) {
    double next = 0.0;
    for (const auto& conv : block.branches) {
      out.emplace_back(conv.name, bound);
      const auto& p = params.at(conv.name);
      const std::size_t taps = conv.in_channels * conv.kernel_size;
      for (std::size_t f = 0; f < conv.out_channels; ++f) {
        double s = std::abs(p.bias[f]);
        for (std::size_t t = 0; t < taps; ++t) s += std::abs(p.weights[f * taps + t]) * bound;
        next = std::max(next, s);
      }
    }
    bound = next;
  }
  for (std::size_t d = 0; d < spec.dense.size(); ++d) {
    const auto& fc = spec.dense[d];
    out.emplace_back(fc.name, bound > 0.0 ? bound : 1.0);
    const auto& p = params.at(fc.name);
    double next = 0.0;
    for (std::size_t o = 0; o < fc.out_features; ++o) {
      double s = std::abs(p.bias[o]);
      for (std::size_t i = 0; i < fc.in_features; ++i) {
        s += std::abs(p.weights[i * fc.out_features + o]) * bound;
      }
      next = std::max(next, s);
    }
    bound = next;
  }
  return out;
}

namespace {

void relocate(LayerPlan& layer, std::size_t tile_offset) {
  for (auto& s : layer.sections) s.tile += tile_offset;
}

std::size_t fragment_tiles(const LayerPlan& layer) {
  std::size_t n = 0;
  for (const auto& s : layer.sections) n = std::max(n, s.tile + 1);
  return n;
}

// Rows of a tile touched by any placed section.
std::vector<bool> occupied_rows(const std::vector<LayerPlan>& layers, std::size_t tile) {
  std::vector<bool> used(kTileRows, false);
  for (const auto& l : layers) {
    for (const auto& s : l.sections) {
      if (s.tile != tile) continue;
      for (std::size_t r : s.row_map) used[r] = true;
    }
  }
  return used;
}

// Places a single-section dense layer into the bottom-most run of free rows
// of an existing tile, left-aligned. Returns false when nothing fits.
bool share_tile(LayerPlan& fc, const std::vector<LayerPlan>& placed,
                const std::vector<TileInfo>& tiles) {
  if (fc.sections.size() != 1) return false;
  Section& s = fc.sections.front();
  const std::size_t rows = s.row_map.size();
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    auto used = occupied_rows(placed, t);
    if (tiles[t].conv_tile) {
      for (std::size_t r = kBiasRow; r < kTileRows; ++r) used[r] = true;
    }
    std::size_t run = 0;
    for (std::size_t r = kTileRows; r-- > 0;) {
      run = used[r] ? 0 : run + 1;
      if (run >= rows) {
        s.tile = t;
        s.row_map = iota_rows(rows, r);
        s.col_offset = 0;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

MappingPlan compile_network(const nn::NetworkSpec& spec, const nn::NetworkParams& params,
                            Scheme scheme, const CompileOptions& options) {
  nn::validate_params(spec, params);
  MappingPlan plan;
  plan.spec = spec;
  plan.scheme = scheme;

  auto add_tiles = [&](LayerPlan& layer, bool conv) {
    const std::size_t offset = plan.tiles.size();
    relocate(layer, offset);
    for (std::size_t t = 0; t < fragment_tiles(layer) - offset; ++t) {
      plan.tiles.push_back({{layer.layer}, conv});
    }
  };

  for (const auto& block : spec.blocks) {
    for (const auto& conv : block.branches) {
      ConvGeometry g;
      g.n_filters = conv.out_channels;
      g.in_channels = conv.in_channels;
      g.kernel_len = conv.kernel_size;
      g.input_len = conv.in_length;
      g.pad_left = conv.pad_left;
      g.pad_right = conv.pad_right;
      g.bias = true;
      LayerPlan layer = scheme == Scheme::WeightStationary
                            ? plan_conv_weight_stationary(g, conv.name)
                            : plan_conv_staggered(g, conv.name);
      add_tiles(layer, true);
      plan.layers.push_back(std::move(layer));
    }
  }
  for (const auto& fc : spec.dense) {
    LayerPlan layer = plan_fc(fc.in_features, fc.out_features, fc.name);
    if (share_tile(layer, plan.layers, plan.tiles)) {
      plan.tiles[layer.sections.front().tile].layers.push_back(layer.layer);
    } else {
      add_tiles(layer, false);
    }
    plan.layers.push_back(std::move(layer));
  }

  if (plan.tiles.size() > options.tile_budget) {
    throw MappingError("plan needs " + std::to_string(plan.tiles.size()) +
                       " tiles, exceeds tile budget of " + std::to_string(options.tile_budget));
  }

  const auto bounds = interval_input_bounds(spec, params);
  for (auto& layer : plan.layers) {
    for (const auto& [name, b] : bounds) {
      if (name == layer.layer) layer.input_full_scale = b > 0.0 ? b : 1.0;
    }
    for (const auto& [name, v] : options.input_full_scale) {
      if (name == layer.layer) {
        if (!(v > 0.0)) throw MappingError(name + ": input full scale must be > 0");
        layer.input_full_scale = v;
      }
    }
  }
  check_placements(plan);
  return plan;
}

}  // namespace xbar::mapping

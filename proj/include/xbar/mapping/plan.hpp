#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xbar/nn/network.hpp"

namespace xbar::mapping {

inline constexpr std::size_t kTileRows = 64;
inline constexpr std::size_t kTileCols = 64;
inline constexpr std::size_t kTilePairs = kTileCols / 2;
inline constexpr std::size_t kBiasRows = 2;
inline constexpr std::size_t kConvDataRows = kTileRows - kBiasRows;
inline constexpr std::size_t kBiasRow = kConvDataRows;  // first reserved row

inline constexpr double kROn = 10e3;
inline constexpr double kROff = 100e3;
inline constexpr double kGOn = 1.0 / kROn;
inline constexpr double kGOff = 1.0 / kROff;

class MappingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConductanceWindow {
  double g_off = kGOff;
  double g_on = kGOn;
  double span() const { return g_on - g_off; }
};

struct DifferentialPair {
  double g_plus = 0.0;
  double g_minus = 0.0;
};

// One-sided encoding: the column of the opposite sign rests at g_off.
DifferentialPair map_weight_to_pair(double w, double scale, const ConductanceWindow& window = {});
double recover_weight(const DifferentialPair& pair, double scale);

enum class Scheme { Staggered, WeightStationary };

std::string_view to_string(Scheme s);
// Accepts "staggered"/"a" and "stationary"/"weight-stationary"/"b".
Scheme parse_scheme(std::string_view s);

struct CellBudget {
  std::size_t cells_used = 0;
  std::size_t cells_used_incl_sparsity = 0;
  std::size_t pass_count = 0;
};

struct ConvGeometry {
  std::size_t n_filters = 1;
  std::size_t in_channels = 1;
  std::size_t kernel_len = 1;
  std::size_t input_len = 1;
  std::size_t pad_left = 0;
  std::size_t pad_right = 0;
  bool bias = true;

  std::size_t padded_len() const { return input_len + pad_left + pad_right; }
  std::size_t positions() const;
};

enum class LayerRole { Conv, Dense };

// A rectangular piece of a layer's logical matrix resident on one tile.
// Logical row row_begin + i sits on tile row row_map[i]; logical column
// col_begin + j uses tile columns (col_offset + 2j, col_offset + 2j + 1).
struct Section {
  std::size_t tile = 0;
  std::size_t row_begin = 0;
  std::vector<std::size_t> row_map;
  std::size_t col_begin = 0;
  std::size_t pairs = 0;
  std::size_t col_offset = 0;
  std::size_t pass = 0;  // activation slot within the layer's tile stack
};

inline constexpr std::ptrdiff_t kZeroInput = -1;
inline constexpr std::ptrdiff_t kBiasInput = -2;

// Placement of one layer. The logical matrix has one row per input feature
// (conv: per kernel tap, or per padded input sample under the staggered
// scheme) plus a trailing bias row, and one column per output.
struct LayerPlan {
  std::string layer;
  LayerRole role = LayerRole::Conv;
  Scheme scheme = Scheme::WeightStationary;
  ConvGeometry conv;           // Conv only
  std::size_t in_features = 0;   // Dense only
  std::size_t out_features = 0;  // Dense only
  std::vector<Section> sections;
  CellBudget budget;
  double input_full_scale = 1.0;  // input value that maps to the DAC's v_max

  std::size_t logical_rows() const;
  std::size_t logical_cols() const;
  std::size_t bias_row() const { return logical_rows() - 1; }
  // Number of distinct row-driving activations of the layer.
  std::size_t passes() const;
  std::size_t weight_count() const;

  // Source of a logical row's drive during pass p: an index into the layer
  // input (channel-major for conv), kZeroInput, or kBiasInput.
  std::ptrdiff_t row_input(std::size_t pass, std::size_t row) const;
  // Destination of a logical column during pass p (channel-major for conv).
  std::size_t col_output(std::size_t pass, std::size_t col) const;
  bool section_active(const Section& s, std::size_t pass) const;

  // Parameter index (weights first, then biases) stored at a logical cell,
  // nullopt for structural zeros. copy is set to the output position for
  // staggered replicas.
  std::optional<std::size_t> param_index(std::size_t row, std::size_t col,
                                         std::size_t* copy = nullptr) const;
};

struct TileInfo {
  std::vector<std::string> layers;
  bool conv_tile = false;  // rows kBiasRow.. are reserved
};

struct MappingPlan {
  nn::NetworkSpec spec;
  Scheme scheme = Scheme::WeightStationary;
  std::vector<TileInfo> tiles;
  std::vector<LayerPlan> layers;  // in execution order

  const LayerPlan& layer(const std::string& name) const;
  LayerPlan& layer(const std::string& name);
  std::size_t tile_count() const { return tiles.size(); }
  std::size_t cells_used() const;
};

struct Placement {
  std::string layer;
  std::size_t index = 0;  // into weights, then bias (index >= weight count)
  std::size_t copy = 0;
  std::size_t tile = 0;
  std::size_t row = 0;
  std::size_t col_plus = 0;
  std::size_t col_minus = 0;
};

std::vector<Placement> placements(const MappingPlan& plan);
std::vector<Placement> placements(const LayerPlan& layer);

// Budgets. Tile indices in the fragments start at 0.
LayerPlan plan_conv_staggered(const ConvGeometry& g, const std::string& name = "conv");
LayerPlan plan_conv_weight_stationary(const ConvGeometry& g, const std::string& name = "conv");
LayerPlan plan_fc(std::size_t in_features, std::size_t out_features,
                  const std::string& name = "fc");

struct SchemeComparison {
  CellBudget staggered;
  CellBudget weight_stationary;
  double area_reduction = 1.0;
  double computation_increase = 1.0;
  Scheme recommendation = Scheme::WeightStationary;  // area priority
};

SchemeComparison compare_schemes(const ConvGeometry& g);

struct CompileOptions {
  std::size_t tile_budget = 8;
  // Per-layer input full scale overrides, by layer name.
  std::vector<std::pair<std::string, double>> input_full_scale;
};

MappingPlan compile_network(const nn::NetworkSpec& spec, const nn::NetworkParams& params,
                            Scheme scheme, const CompileOptions& options = {});

// Worst-case |input| bound per parameter layer, propagated from |x| <= 1.
std::vector<std::pair<std::string, double>> interval_input_bounds(
    const nn::NetworkSpec& spec, const nn::NetworkParams& params);

// Throws MappingError on a shared cell or out-of-bounds placement.
void check_placements(const MappingPlan& plan);

}  // namespace xbar::mapping

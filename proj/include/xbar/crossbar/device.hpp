#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xbar/crossbar/config.hpp"
#include "xbar/mapping/plan.hpp"
#include "xbar/mapping/targets.hpp"

namespace xbar::crossbar {

enum class Stuck : std::uint8_t { Free, StuckOn, StuckOff };

struct StuckMap {
  std::size_t rows = mapping::kTileRows;
  std::size_t cols = mapping::kTileCols;
  std::vector<Stuck> cells = std::vector<Stuck>(rows * cols, Stuck::Free);

  Stuck at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
  Stuck& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
  std::size_t count(Stuck s) const;
};

// 64x64 device grid. scale is the siemens-per-unit-weight the tile was
// programmed for; readout divides by it.
struct CrossbarTile {
  static constexpr std::size_t rows = mapping::kTileRows;
  static constexpr std::size_t cols = mapping::kTileCols;

  std::vector<double> g = std::vector<double>(rows * cols, mapping::kGOff);
  StuckMap stuck;
  double scale = 1.0;

  double at(std::size_t r, std::size_t c) const { return g[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return g[r * cols + c]; }
};

// Independent generator per (seed, tile, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Per device: StuckOn with p_stuck_on, else StuckOff with p_stuck_off.
StuckMap sample_stuck_map(const NonIdealityConfig& cfg, std::size_t tile_index);

// Write path per device: compress into the g_window_scale-adjusted window,
// quantize to write_bits levels, multiply by (1 + N(0, write_sigma)), clamp,
// then apply stuck overrides.
CrossbarTile program_tile(const mapping::TileImage& target, const NonIdealityConfig& cfg,
                          std::size_t tile_index, const StuckMap& stuck,
                          const mapping::ConductanceWindow& window = {});
CrossbarTile program_tile(const mapping::TileImage& target, const NonIdealityConfig& cfg,
                          std::size_t tile_index, const mapping::ConductanceWindow& window = {});

std::vector<StuckMap> sample_stuck_maps(const NonIdealityConfig& cfg, std::size_t tiles);
std::vector<CrossbarTile> program_tiles(std::span<const mapping::TileImage> targets,
                                        const NonIdealityConfig& cfg,
                                        const mapping::ConductanceWindow& window = {});
std::vector<CrossbarTile> program_tiles(std::span<const mapping::TileImage> targets,
                                        const NonIdealityConfig& cfg,
                                        std::span<const StuckMap> stuck,
                                        const mapping::ConductanceWindow& window = {});

std::vector<mapping::TileImage> images(std::span<const CrossbarTile> tiles);

}  // namespace xbar::crossbar

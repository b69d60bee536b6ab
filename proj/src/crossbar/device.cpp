#include "xbar/crossbar/device.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <string>

#include "xbar/nn/quantize.hpp"

namespace xbar::crossbar {

std::size_t StuckMap::count(Stuck s) const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), s));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

constexpr std::uint64_t kStuckStream = 1;
constexpr std::uint64_t kWriteStream = 2;

}  // namespace

StuckMap sample_stuck_map(const NonIdealityConfig& cfg, std::size_t tile_index) {
  cfg.validate();
  StuckMap map;
  if (cfg.p_stuck_on == 0.0 && cfg.p_stuck_off == 0.0) return map;
  std::mt19937_64 rng(derive_seed(cfg.rng_seed, tile_index, kStuckStream));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& cell : map.cells) {
    const double x = u(rng);
    if (x < cfg.p_stuck_on) {
      cell = Stuck::StuckOn;
    } else if (x < cfg.p_stuck_on + cfg.p_stuck_off) {
      cell = Stuck::StuckOff;
    }
  }
  return map;
}

CrossbarTile program_tile(const mapping::TileImage& target, const NonIdealityConfig& cfg,
                          std::size_t tile_index, const StuckMap& stuck,
                          const mapping::ConductanceWindow& window) {
  cfg.validate();
  if (target.g.size() != CrossbarTile::rows * CrossbarTile::cols ||
      stuck.cells.size() != target.g.size()) {
    throw ConfigError("program_tile: grid is not 64x64");
  }
  const double lo = window.g_off;
  const double hi = window.g_off + cfg.g_window_scale * window.span();
  const double tol = 1e-12 * window.g_on;

  CrossbarTile tile;
  tile.scale = target.scale;
  tile.stuck = stuck;
  std::mt19937_64 rng(derive_seed(cfg.rng_seed, tile_index, kWriteStream));
  std::normal_distribution<double> noise(0.0, cfg.write_sigma);
  std::optional<nn::Quantizer> q;
  if (cfg.write_bits > 0) q.emplace(cfg.write_bits, lo, hi);

  for (std::size_t i = 0; i < target.g.size(); ++i) {
    const double t = target.g[i];
    if (!(t >= window.g_off - tol && t <= window.g_on + tol)) {
      throw ConfigError("program_tile: target " + std::to_string(t) + " S outside window");
    }
    double g = lo + cfg.g_window_scale * (std::clamp(t, window.g_off, window.g_on) - window.g_off);
    if (q) g = (*q)(g);
    if (cfg.write_sigma > 0.0) g *= 1.0 + noise(rng);
    g = std::clamp(g, lo, hi);
    switch (stuck.cells[i]) {
      case Stuck::StuckOn: g = window.g_on; break;
      case Stuck::StuckOff: g = window.g_off; break;
      case Stuck::Free: break;
    }
    tile.g[i] = g;
  }
  return tile;
}

CrossbarTile program_tile(const mapping::TileImage& target, const NonIdealityConfig& cfg,
                          std::size_t tile_index, const mapping::ConductanceWindow& window) {
  return program_tile(target, cfg, tile_index, sample_stuck_map(cfg, tile_index), window);
}

std::vector<StuckMap> sample_stuck_maps(const NonIdealityConfig& cfg, std::size_t tiles) {
  std::vector<StuckMap> out;
  out.reserve(tiles);
  for (std::size_t t = 0; t < tiles; ++t) out.push_back(sample_stuck_map(cfg, t));
  return out;
}

std::vector<CrossbarTile> program_tiles(std::span<const mapping::TileImage> targets,
                                        const NonIdealityConfig& cfg,
                                        std::span<const StuckMap> stuck,
                                        const mapping::ConductanceWindow& window) {
  if (stuck.size() != targets.size()) throw ConfigError("program_tiles: stuck map count mismatch");
  std::vector<CrossbarTile> out;
  out.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    out.push_back(program_tile(targets[t], cfg, t, stuck[t], window));
  }
  return out;
}

std::vector<CrossbarTile> program_tiles(std::span<const mapping::TileImage> targets,
                                        const NonIdealityConfig& cfg,
                                        const mapping::ConductanceWindow& window) {
  const auto stuck = sample_stuck_maps(cfg, targets.size());
  return program_tiles(targets, cfg, stuck, window);
}

std::vector<mapping::TileImage> images(std::span<const CrossbarTile> tiles) {
  std::vector<mapping::TileImage> out(tiles.size());
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    out[t].g = tiles[t].g;
    out[t].scale = tiles[t].scale;
  }
  return out;
}

}  // namespace xbar::crossbar

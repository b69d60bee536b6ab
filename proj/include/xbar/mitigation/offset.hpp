#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "xbar/crossbar/device.hpp"
#include "xbar/mapping/plan.hpp"
#include "xbar/mapping/targets.hpp"

namespace xbar::mitigation {

struct RepairReport {
  std::size_t placements = 0;
  std::size_t stuck_devices = 0;        // stuck devices under placements
  std::size_t one_stuck = 0;            // placements with exactly one stuck device
  std::size_t repaired = 0;             // one stuck, residual 0 after offsetting
  std::size_t unrepairable_both_stuck = 0;
  std::size_t unrepairable_saturated = 0;  // one stuck, complement clamped
  std::size_t write_passes = 0;
  std::vector<double> residual;         // |represented - target| per placement, weight units
  std::vector<double> residual_before;  // same without repair

  std::size_t unrepairable() const { return unrepairable_both_stuck + unrepairable_saturated; }
  double mean_residual() const;
  double mean_residual_before() const;
};

nlohmann::json to_json(const RepairReport& r, bool include_residuals = false);

// Weight each placement would represent if programmed from `tiles` with the
// stuck overrides applied and no other device error.
double represented_weight(const mapping::Placement& p, std::span<const mapping::TileImage> tiles,
                          std::span<const crossbar::StuckMap> stuck,
                          const mapping::ConductanceWindow& window);

// Single-pass stuck weight offsetting: for a pair with exactly one stuck
// device the free complement is set to clamp(g_stuck -/+ w * scale).
// Returns adjusted targets; pairs with both or neither stuck are untouched.
std::vector<mapping::TileImage> offset_stuck_weights(std::span<const mapping::Placement> placements,
                                                     std::span<const mapping::TileImage> targets,
                                                     std::span<const crossbar::StuckMap> stuck,
                                                     const mapping::ConductanceWindow& window,
                                                     RepairReport* report = nullptr);
std::vector<mapping::TileImage> offset_stuck_weights(const mapping::MappingPlan& plan,
                                                     std::span<const mapping::TileImage> targets,
                                                     std::span<const crossbar::StuckMap> stuck,
                                                     const mapping::ConductanceWindow& window = {},
                                                     RepairReport* report = nullptr);

// Two-pass baseline: every free device written to g_off, then each free
// device adjusted in turn to the value closest to its pair's target.
std::vector<mapping::TileImage> inner_fault_tolerance_baseline(
    std::span<const mapping::Placement> placements, std::span<const mapping::TileImage> targets,
    std::span<const crossbar::StuckMap> stuck, const mapping::ConductanceWindow& window,
    RepairReport* report = nullptr);
std::vector<mapping::TileImage> inner_fault_tolerance_baseline(
    const mapping::MappingPlan& plan, std::span<const mapping::TileImage> targets,
    std::span<const crossbar::StuckMap> stuck, const mapping::ConductanceWindow& window = {},
    RepairReport* report = nullptr);

}  // namespace xbar::mitigation

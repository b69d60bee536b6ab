#include "xbar/mitigation/offset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xbar::mitigation {

using crossbar::Stuck;
using crossbar::StuckMap;
using mapping::ConductanceWindow;
using mapping::Placement;
using mapping::TileImage;

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stuck_value(Stuck s, double g, const ConductanceWindow& w) {
  switch (s) {
    case Stuck::StuckOn: return w.g_on;
    case Stuck::StuckOff: return w.g_off;
    case Stuck::Free: return g;
  }
  return g;
}

void check_shapes(std::span<const TileImage> targets, std::span<const StuckMap> stuck) {
  if (targets.size() != stuck.size()) {
    throw mapping::MappingError("mitigation: " + std::to_string(stuck.size()) +
                                " stuck maps for " + std::to_string(targets.size()) + " tiles");
  }
}

struct PairView {
  double w;      // target weight
  double scale;
  Stuck sp, sm;
  double tp, tm;  // target conductances
};

PairView view(const Placement& p, std::span<const TileImage> targets,
              std::span<const StuckMap> stuck) {
  const auto& img = targets[p.tile];
  PairView v;
  v.tp = img.at(p.row, p.col_plus);
  v.tm = img.at(p.row, p.col_minus);
  v.scale = img.scale;
  v.w = (v.tp - v.tm) / v.scale;
  v.sp = stuck[p.tile].at(p.row, p.col_plus);
  v.sm = stuck[p.tile].at(p.row, p.col_minus);
  return v;
}

// Closest complement to a stuck partner; returns the new free conductance.
double complement(const PairView& v, bool plus_stuck, const ConductanceWindow& w) {
  if (plus_stuck) {
    const double s = stuck_value(v.sp, v.tp, w);
    return std::clamp(s - v.w * v.scale, w.g_off, w.g_on);
  }
  const double s = stuck_value(v.sm, v.tm, w);
  return std::clamp(s + v.w * v.scale, w.g_off, w.g_on);
}

void account(RepairReport& r, const PairView& v, double g_plus, double g_minus,
             const ConductanceWindow& w) {
  const double before =
      (stuck_value(v.sp, v.tp, w) - stuck_value(v.sm, v.tm, w)) / v.scale;
  const double after =
      (stuck_value(v.sp, g_plus, w) - stuck_value(v.sm, g_minus, w)) / v.scale;
  const double res = std::abs(after - v.w);
  r.residual_before.push_back(std::abs(before - v.w));
  r.residual.push_back(res);
  ++r.placements;
  const int n_stuck = (v.sp != Stuck::Free) + (v.sm != Stuck::Free);
  r.stuck_devices += static_cast<std::size_t>(n_stuck);
  if (n_stuck == 2) {
    ++r.unrepairable_both_stuck;
  } else if (n_stuck == 1) {
    ++r.one_stuck;
    if (res * v.scale <= 1e-12 * w.g_on) {
      ++r.repaired;
    } else {
      ++r.unrepairable_saturated;
    }
  }
}

}  // namespace

double RepairReport::mean_residual() const { return mean(residual); }
double RepairReport::mean_residual_before() const { return mean(residual_before); }

nlohmann::json to_json(const RepairReport& r, bool include_residuals) {
  nlohmann::json j = {{"placements", r.placements},
                      {"stuck_devices", r.stuck_devices},
                      {"one_stuck", r.one_stuck},
                      {"repaired", r.repaired},
                      {"unrepairable_both_stuck", r.unrepairable_both_stuck},
                      {"unrepairable_saturated", r.unrepairable_saturated},
                      {"write_passes", r.write_passes},
                      {"mean_residual", r.mean_residual()},
                      {"mean_residual_before", r.mean_residual_before()}};
  if (include_residuals) j["residual"] = r.residual;
  return j;
}

double represented_weight(const Placement& p, std::span<const TileImage> tiles,
                          std::span<const StuckMap> stuck, const ConductanceWindow& window) {
  const auto& img = tiles[p.tile];
  const double gp = stuck_value(stuck[p.tile].at(p.row, p.col_plus), img.at(p.row, p.col_plus), window);
  const double gm =
      stuck_value(stuck[p.tile].at(p.row, p.col_minus), img.at(p.row, p.col_minus), window);
  return (gp - gm) / img.scale;
}

std::vector<TileImage> offset_stuck_weights(std::span<const Placement> placements,
                                            std::span<const TileImage> targets,
                                            std::span<const StuckMap> stuck,
                                            const ConductanceWindow& window,
                                            RepairReport* report) {
  check_shapes(targets, stuck);
  std::vector<TileImage> out(targets.begin(), targets.end());
  RepairReport r;
  r.write_passes = 1;
  for (const auto& p : placements) {
    const PairView v = view(p, targets, stuck);
    double gp = v.tp, gm = v.tm;
    const bool ps = v.sp != Stuck::Free;
    const bool ms = v.sm != Stuck::Free;
    if (ps && !ms) gm = complement(v, true, window);
    if (ms && !ps) gp = complement(v, false, window);
    out[p.tile].at(p.row, p.col_plus) = gp;
    out[p.tile].at(p.row, p.col_minus) = gm;
    account(r, v, gp, gm, window);
  }
  if (report) *report = std::move(r);
  return out;
}

std::vector<TileImage> offset_stuck_weights(const mapping::MappingPlan& plan,
                                            std::span<const TileImage> targets,
                                            std::span<const StuckMap> stuck,
                                            const ConductanceWindow& window,
                                            RepairReport* report) {
  const auto pl = mapping::placements(plan);
  return offset_stuck_weights(pl, targets, stuck, window, report);
}

std::vector<TileImage> inner_fault_tolerance_baseline(std::span<const Placement> placements,
                                                      std::span<const TileImage> targets,
                                                      std::span<const StuckMap> stuck,
                                                      const ConductanceWindow& window,
                                                      RepairReport* report) {
  check_shapes(targets, stuck);
  std::vector<TileImage> out(targets.begin(), targets.end());
  // Pass 1: every available device to its default.
  for (std::size_t t = 0; t < out.size(); ++t) {
    for (std::size_t i = 0; i < out[t].g.size(); ++i) {
      if (stuck[t].cells[i] == Stuck::Free) out[t].g[i] = window.g_off;
    }
  }
  // Pass 2: coordinate sweep over the free devices of each pair.
  RepairReport r;
  r.write_passes = 2;
  for (const auto& p : placements) {
    const PairView v = view(p, targets, stuck);
    auto& img = out[p.tile];
    double gp = stuck_value(v.sp, img.at(p.row, p.col_plus), window);
    double gm = stuck_value(v.sm, img.at(p.row, p.col_minus), window);
    if (v.sp == Stuck::Free) gp = std::clamp(gm + v.w * v.scale, window.g_off, window.g_on);
    if (v.sm == Stuck::Free) gm = std::clamp(gp - v.w * v.scale, window.g_off, window.g_on);
    if (v.sp == Stuck::Free) img.at(p.row, p.col_plus) = gp;
    if (v.sm == Stuck::Free) img.at(p.row, p.col_minus) = gm;
    account(r, v, img.at(p.row, p.col_plus), img.at(p.row, p.col_minus), window);
  }
  if (report) *report = std::move(r);
  return out;
}

std::vector<TileImage> inner_fault_tolerance_baseline(const mapping::MappingPlan& plan,
                                                      std::span<const TileImage> targets,
                                                      std::span<const StuckMap> stuck,
                                                      const ConductanceWindow& window,
                                                      RepairReport* report) {
  const auto pl = mapping::placements(plan);
  return inner_fault_tolerance_baseline(pl, targets, stuck, window, report);
}

}  // namespace xbar::mitigation

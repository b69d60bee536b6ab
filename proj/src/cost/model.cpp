#include "xbar/cost/model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xbar::cost {

std::string_view to_string(Variant v) { return v == Variant::TDM ? "tdm" : "parallel"; }
std::string_view to_string(Scenario s) { return s == Scenario::AllOn ? "on" : "mid"; }

Variant parse_variant(std::string_view s) {
  if (s == "tdm" || s == "TDM") return Variant::TDM;
  if (s == "parallel" || s == "parallelized") return Variant::Parallel;
  throw CostError("unknown variant '" + std::string(s) + "' (expected tdm or parallel)");
}

Scenario parse_scenario(std::string_view s) {
  if (s == "on" || s == "allon") return Scenario::AllOn;
  if (s == "mid" || s == "midpoint") return Scenario::Midpoint;
  throw CostError("unknown scenario '" + std::string(s) + "' (expected on or mid)");
}

namespace {

constexpr double kCanonicalTiles = 7.0;

// Entry from the published row: totals for the canonical 7-tile design.
ComponentSpec row(std::string name, std::string spec, double per_tile, double shared,
                  double area_total, double power_total, double unit_latency) {
  const double n = per_tile * kCanonicalTiles + shared;
  return {std::move(name), std::move(spec), per_tile,          shared,
          area_total / n,  power_total / n,  unit_latency};
}

}  // namespace

std::vector<ComponentSpec> component_table(Variant variant, Scenario scenario) {
  const bool tdm = variant == Variant::TDM;
  double xbar_power = 4.35;
  if (scenario == Scenario::AllOn) xbar_power = tdm ? 8.67 : 8.69;
  std::vector<ComponentSpec> t;
  t.push_back(row("DAC", "6 bits", 64, 0, 25.8, 2690.0, 8.00e-4));
  if (tdm) {
    t.push_back(row("ADC", "6 bits, 10MHz", 1, 0, 4.62, 70.0, 1.00e-1));
  } else {
    t.push_back(row("ADC", "6 bits, 10MHz", 64, 0, 296.0, 4480.0, 1.00e-1));
  }
  t.push_back(row("ReLU", "", 0, 2, 9.60e-3, 3.28e-2, 9.80e-2));
  t.push_back(row("Average Pool", "", 0, 1, 3.83e-4, 1.59, 8.49e-5));
  t.push_back(row("Adder", "", 0, 10, 5.34e-3, 1.74e-2, 3.06e-4));
  if (tdm) {
    t.push_back(row("Subtractor", "", 1, 0, 2.46e-4, 2.87e-1, 3.34e-4));
  } else {
    t.push_back(row("Subtractor", "", 32, 0, 7.88e-3, 9.20, 3.34e-4));
  }
  t.push_back(row("S+H", "", 64, 0, 8.98e-6, 3.81e-3, 8.33e-4));
  t.push_back(row("eDRAM Buffer", "2KB, 128-bit bus", 0, 1, 4.72e-3, 18.1, 1.15e-4));
  t.push_back(row("eDRAM-Tile Bus", "", 0, 192, 4.50e-3, 3.5, 9.02e-5));
  t.push_back(row("IR", "1KB", 0, 1, 8.10e-1, 6.74e-1, 8.21e-5));
  t.push_back(row("OR", "512B", 0, 1, 8.70e-4, 4.18e-1, 8.21e-5));
  t.push_back(row("Crossbar", "64x64", 1, 0, 2.87e-4, xbar_power,
                  scenario == Scenario::AllOn ? kPassLatencyAllOn : kPassLatencyMidpoint));
  return t;
}

namespace {

double path_resistance(Scenario s, double r_line, double r_source) {
  return scenario_resistance(s) + r_source + static_cast<double>(mapping::kTileRows) * r_line;
}

}  // namespace

double scenario_resistance(Scenario s) {
  return s == Scenario::AllOn ? mapping::kROn : (mapping::kROn + mapping::kROff) / 2.0;
}

RcCalibration RcCalibration::published() {
  const double r_on = path_resistance(Scenario::AllOn, 2.0, 20.0);
  const double r_mid = path_resistance(Scenario::Midpoint, 2.0, 20.0);
  RcCalibration c;
  c.k = (kPassLatencyMidpoint - kPassLatencyAllOn) / (r_mid - r_on);
  c.t_fixed = kPassLatencyAllOn - c.k * r_on;
  return c;
}

double crossbar_pass_latency(Scenario s, double r_line, double r_source,
                             const RcCalibration& cal) {
  if (r_line < 0.0 || r_source < 0.0) throw CostError("crossbar_pass_latency: negative resistance");
  return cal.t_fixed + cal.k * path_resistance(s, r_line, r_source);
}

double ExecutionSchedule::count(std::string_view component) const {
  for (const auto& [name, n] : invocations) {
    if (name == component) return n;
  }
  throw CostError("schedule has no invocation count for component '" + std::string(component) +
                  "'");
}

ExecutionSchedule make_schedule(const mapping::MappingPlan& plan, Variant variant,
                                ScheduleKind kind) {
  ExecutionSchedule s;
  s.kind = kind;
  s.variant = variant;
  s.tiles = plan.tile_count();
  s.columns = mapping::kTileCols;

  std::size_t rounds = 0;
  for (const auto& block : plan.spec.blocks) {
    std::size_t block_rounds = 0;
    for (const auto& conv : block.branches) {
      for (const auto& l : plan.layers) {
        if (l.layer != conv.name) continue;
        block_rounds = std::max(block_rounds, kind == ScheduleKind::PassAccurate ? l.passes()
                                                                                 : std::size_t{1});
      }
    }
    rounds += block_rounds;
  }
  for (const auto& l : plan.layers) {
    if (l.role == mapping::LayerRole::Dense) rounds += l.passes();
  }
  s.rounds = rounds;

  const double R = static_cast<double>(s.rounds);
  const double T = static_cast<double>(s.tiles);
  const double C = static_cast<double>(s.columns);
  const double any = s.tiles > 0 ? 1.0 : 0.0;
  const bool tdm = variant == Variant::TDM;
  s.invocations = {
      {"DAC", tdm ? R * T * C : R * T},
      {"ADC", tdm ? R * T * C : R},
      {"ReLU", 1.0 * any},
      {"Average Pool", 1.0 * any},
      {"Adder", 2.0 * any},
      {"Subtractor", tdm ? R * C : R},
      {"S+H", R},
      {"eDRAM Buffer", 2.0 * any},
      {"eDRAM-Tile Bus", 1.0 * any},
      {"IR", 2.0 * any},
      {"OR", 2.0 * any},
      {"Crossbar", tdm ? T * C * C : (s.tiles > 0 ? C : 0.0)},
  };
  return s;
}

CostReport total_cost(const mapping::MappingPlan& plan, Variant variant, Scenario scenario,
                      const CostOptions& options) {
  return total_cost(plan, component_table(variant, scenario), variant, scenario, options);
}

namespace {

double latency_sum(const std::vector<ComponentSpec>& table, const ExecutionSchedule& s,
                   double pass_latency) {
  double total = 0.0;
  for (const auto& c : table) {
    const double unit = c.name == "Crossbar" ? pass_latency : c.unit_latency;
    total += unit * s.count(c.name);
  }
  return total;
}

}  // namespace

CostReport total_cost(const mapping::MappingPlan& plan, const std::vector<ComponentSpec>& table,
                      Variant variant, Scenario scenario, const CostOptions& options) {
  CostReport r;
  r.variant = variant;
  r.scenario = scenario;
  r.power_mode = options.power_mode;
  r.schedule = make_schedule(plan, variant, ScheduleKind::TableCalibrated);
  r.pass_accurate = make_schedule(plan, variant, ScheduleKind::PassAccurate);
  const double pass = crossbar_pass_latency(scenario, options.r_line, options.r_source, options.rc);

  for (const auto& c : table) {
    ComponentCost cc;
    cc.name = c.name;
    cc.specification = c.specification;
    cc.instances = c.instances(plan.tile_count());
    cc.area = cc.instances * c.unit_area;
    cc.power = cc.instances * c.unit_power;
    cc.unit_latency = c.name == "Crossbar" ? pass : c.unit_latency;
    cc.invocations = r.schedule.count(c.name);
    cc.latency = cc.unit_latency * cc.invocations;
    r.components.push_back(cc);
    r.area += cc.area;
    r.latency += cc.latency;
  }
  for (auto& cc : r.components) {
    if (options.power_mode == PowerMode::Average) {
      cc.power *= r.latency > 0.0 ? std::min(1.0, cc.latency / r.latency) : 0.0;
    }
    cc.energy = cc.power * cc.latency * 1e-3;  // mW * us = nJ
    r.power += cc.power;
    r.active_energy += cc.energy;
  }
  r.energy = r.power * r.latency * 1e-3;
  r.pass_accurate_latency = latency_sum(table, r.pass_accurate, pass);
  return r;
}

std::vector<ComponentSpec> scale_technology(std::vector<ComponentSpec> table,
                                            const TechnologyFactors& f) {
  if (!(f.area > 0.0) || !(f.power > 0.0) || !(f.latency > 0.0)) {
    throw CostError("scale_technology: factors must be positive");
  }
  for (auto& c : table) {
    c.unit_area *= f.area;
    c.unit_power *= f.power;
    c.unit_latency *= f.latency;
  }
  return table;
}

std::vector<ComponentSpec> apply_overrides(std::vector<ComponentSpec> table,
                                           const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("components") || !j["components"].is_array()) {
    throw CostError("component override: expected {\"components\": [...]}");
  }
  for (const auto& e : j["components"]) {
    if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
      throw CostError("component override: every entry needs a string \"name\"");
    }
    const auto name = e["name"].get<std::string>();
    auto it = std::find_if(table.begin(), table.end(), [&](auto& c) { return c.name == name; });
    if (it == table.end()) throw CostError("component override: unknown component '" + name + "'");
    for (const auto& [key, v] : e.items()) {
      if (key == "name") continue;
      if (key == "specification") {
        it->specification = v.get<std::string>();
        continue;
      }
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw CostError("component override: " + name + "." + key + " must be a number >= 0");
      }
      const double x = v.get<double>();
      if (key == "per_tile") it->per_tile = x;
      else if (key == "shared") it->shared = x;
      else if (key == "unit_area") it->unit_area = x;
      else if (key == "unit_power") it->unit_power = x;
      else if (key == "unit_latency") it->unit_latency = x;
      else throw CostError("component override: unknown field '" + key + "'");
    }
  }
  return table;
}

std::vector<ComponentSpec> load_overrides(std::vector<ComponentSpec> table,
                                          const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CostError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CostError(path.string() + ": " + e.what());
  }
  return apply_overrides(std::move(table), j);
}

nlohmann::json to_json(const ExecutionSchedule& s) {
  nlohmann::json inv = nlohmann::json::object();
  for (const auto& [name, n] : s.invocations) inv[name] = n;
  return {{"kind", s.kind == ScheduleKind::TableCalibrated ? "table-calibrated" : "pass-accurate"},
          {"variant", to_string(s.variant)},
          {"rounds", s.rounds},
          {"tiles", s.tiles},
          {"columns", s.columns},
          {"invocations", inv}};
}

nlohmann::json to_json(const CostReport& r) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"name", c.name},
                     {"specification", c.specification},
                     {"instances", c.instances},
                     {"area_mm2", c.area},
                     {"power_mw", c.power},
                     {"unit_latency_us", c.unit_latency},
                     {"invocations", c.invocations},
                     {"latency_us", c.latency},
                     {"energy_uj", c.energy}});
  }
  return {{"variant", to_string(r.variant)},
          {"scenario", to_string(r.scenario)},
          {"power_mode", r.power_mode == PowerMode::WorstCase ? "worst-case" : "average"},
          {"components", comps},
          {"total",
           {{"area_mm2", r.area},
            {"power_mw", r.power},
            {"latency_us", r.latency},
            {"energy_uj", r.energy},
            {"active_energy_uj", r.active_energy}}},
          {"schedule", to_json(r.schedule)},
          {"pass_accurate", {{"schedule", to_json(r.pass_accurate)},
                             {"latency_us", r.pass_accurate_latency}}}};
}

std::string to_text(const CostReport& r) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "variant %s, scenario %s, power %s\n",
                std::string(to_string(r.variant)).c_str(), std::string(to_string(r.scenario)).c_str(),
                r.power_mode == PowerMode::WorstCase ? "worst-case" : "average");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-16s %10s %11s %11s %11s %11s %13s %11s\n", "Component", "Number",
                "Area(mm2)", "Power(mW)", "Lat(us)", "Invocations", "TotalLat(us)", "Energy(uJ)");
  os << buf;
  for (const auto& c : r.components) {
    std::snprintf(buf, sizeof buf, "%-16s %10g %11.2E %11.2E %11.2E %11g %13.2E %11.2E\n",
                  c.name.c_str(), c.instances, c.area, c.power, c.unit_latency, c.invocations,
                  c.latency, c.energy);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%-16s %10s %11.2E %11.2E %11s %11s %13.2E %11.2E\n", "Total", "",
                r.area, r.power, "", "", r.latency, r.energy);
  os << buf;
  std::snprintf(buf, sizeof buf, "active energy %.4g uJ; pass-accurate latency %.4g us (R = %zu)\n",
                r.active_energy, r.pass_accurate_latency, r.pass_accurate.rounds);
  os << buf;
  return os.str();
}

}  // namespace xbar::cost

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xbar/mapping/plan.hpp"

namespace xbar::cost {

class CostError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { TDM, Parallel };
enum class Scenario { AllOn, Midpoint };

std::string_view to_string(Variant v);
std::string_view to_string(Scenario s);
Variant parse_variant(std::string_view s);    // "tdm", "parallel"
Scenario parse_scenario(std::string_view s);  // "on", "mid"

// Units: mm^2, mW, us. Instances = per_tile * tiles + shared.
struct ComponentSpec {
  std::string name;
  std::string specification;  // e.g. "6 bits", "2KB"
  double per_tile = 0.0;
  double shared = 0.0;
  double unit_area = 0.0;
  double unit_power = 0.0;
  double unit_latency = 0.0;

  double instances(std::size_t tiles) const { return per_tile * static_cast<double>(tiles) + shared; }
};

// The crossbar entry's unit power depends on the scenario; its unit
// latency is replaced by crossbar_pass_latency() in total_cost().
std::vector<ComponentSpec> component_table(Variant variant, Scenario scenario = Scenario::AllOn);

// tau = t_fixed + k * R_path * C_line, R_path = R_device + r_source +
// 64 r_line. C_line is folded into k (us per ohm).
struct RcCalibration {
  double t_fixed = 0.0;  // us
  double k = 0.0;        // us / ohm

  // Fits both constants to the published per-pass latencies.
  static RcCalibration published();
};

inline constexpr double kPassLatencyAllOn = 2.03e-3;
inline constexpr double kPassLatencyMidpoint = 6.07e-3;

double scenario_resistance(Scenario s);  // device ohms: 10k or 55k
double crossbar_pass_latency(Scenario s, double r_line = 2.0, double r_source = 20.0,
                             const RcCalibration& cal = RcCalibration::published());

enum class ScheduleKind { TableCalibrated, PassAccurate };

// Invocation counts per component for one inference.
struct ExecutionSchedule {
  ScheduleKind kind = ScheduleKind::TableCalibrated;
  Variant variant = Variant::TDM;
  std::size_t rounds = 0;   // R: sequential readout rounds
  std::size_t tiles = 0;    // T
  std::size_t columns = 64; // C
  std::vector<std::pair<std::string, double>> invocations;

  double count(std::string_view component) const;  // throws CostError when absent
};

// Table-calibrated: R = conv blocks + sum over FC layers of the largest
// number of sections sharing a tile. Pass-accurate: R = total activations
// of every layer in execution order.
ExecutionSchedule make_schedule(const mapping::MappingPlan& plan, Variant variant,
                                ScheduleKind kind = ScheduleKind::TableCalibrated);

enum class PowerMode { WorstCase, Average };

struct ComponentCost {
  std::string name;
  std::string specification;
  double instances = 0.0;
  double area = 0.0;
  double power = 0.0;
  double unit_latency = 0.0;
  double invocations = 0.0;
  double latency = 0.0;  // unit_latency * invocations
  double energy = 0.0;   // power * latency, uJ
};

struct CostReport {
  Variant variant = Variant::TDM;
  Scenario scenario = Scenario::AllOn;
  PowerMode power_mode = PowerMode::WorstCase;
  ExecutionSchedule schedule;
  ExecutionSchedule pass_accurate;
  std::vector<ComponentCost> components;
  double area = 0.0;     // mm^2
  double power = 0.0;    // mW
  double latency = 0.0;  // us, sum along the serial pipeline
  double energy = 0.0;   // uJ, power * latency (everything powered throughout)
  double active_energy = 0.0;  // uJ, sum of component energies
  double pass_accurate_latency = 0.0;
};

struct CostOptions {
  PowerMode power_mode = PowerMode::WorstCase;
  double r_line = 2.0;
  double r_source = 20.0;
  RcCalibration rc = RcCalibration::published();
};

CostReport total_cost(const mapping::MappingPlan& plan, Variant variant, Scenario scenario,
                      const CostOptions& options = {});
CostReport total_cost(const mapping::MappingPlan& plan, const std::vector<ComponentSpec>& table,
                      Variant variant, Scenario scenario, const CostOptions& options = {});

struct TechnologyFactors {
  double area = 1.0;
  double power = 1.0;
  double latency = 1.0;
};

std::vector<ComponentSpec> scale_technology(std::vector<ComponentSpec> table,
                                            const TechnologyFactors& f);

// {"components": [{"name": "ADC", "unit_power": 5.0, ...}]}: listed fields
// replace those of the matching entry; unknown names are an error.
std::vector<ComponentSpec> apply_overrides(std::vector<ComponentSpec> table,
                                           const nlohmann::json& j);
std::vector<ComponentSpec> load_overrides(std::vector<ComponentSpec> table,
                                          const std::filesystem::path& path);

nlohmann::json to_json(const ExecutionSchedule& s);
nlohmann::json to_json(const CostReport& r);
std::string to_text(const CostReport& r);

}  // namespace xbar::cost

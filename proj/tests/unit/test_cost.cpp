#include <catch2/catch_amalgamated.hpp>

#include "xbar/cost/model.hpp"
#include "xbar/nn/synthetic.hpp"

using namespace xbar;
using namespace xbar::cost;
using Catch::Approx;

namespace {

mapping::MappingPlan canonical_plan() {
  const auto spec = nn::canonical_network();
  return mapping::compile_network(spec, nn::zero_params(spec), mapping::Scheme::WeightStationary);
}

const ComponentSpec& find(const std::vector<ComponentSpec>& t, const std::string& name) {
  for (const auto& c : t) {
    if (c.name == name) return c;
  }
  throw std::runtime_error(name);
}

}  // namespace

TEST_CASE("component table entries") {
  const auto tdm = component_table(Variant::TDM);
  const auto par = component_table(Variant::Parallel);
  CHECK(find(tdm, "ADC").instances(7) * find(tdm, "ADC").unit_area == Approx(4.62));
  CHECK(find(tdm, "ADC").unit_power == Approx(10.0));
  CHECK(find(par, "ADC").instances(7) == 448);
  CHECK(find(par, "ADC").instances(7) * find(par, "ADC").unit_power == Approx(4480));
  CHECK(find(tdm, "DAC").unit_area == find(par, "DAC").unit_area);
  CHECK(find(par, "Subtractor").instances(7) == 224);
  CHECK(tdm.size() == 12);
}

TEST_CASE("crossbar latency calibration") {
  CHECK(crossbar_pass_latency(Scenario::AllOn) == Approx(2.03e-3).epsilon(1e-12));
  CHECK(crossbar_pass_latency(Scenario::Midpoint) == Approx(6.07e-3).epsilon(1e-12));
  CHECK(crossbar_pass_latency(Scenario::AllOn, 0.0) < crossbar_pass_latency(Scenario::AllOn));
  const auto c = RcCalibration::published();
  CHECK(c.t_fixed > 0.0);
  CHECK(crossbar_pass_latency(Scenario::AllOn, 2.0, 20.0, c) ==
        Approx(c.t_fixed + c.k * (10e3 + 20 + 128)));
}

TEST_CASE("canonical totals") {
  const auto plan = canonical_plan();
  const auto tdm = total_cost(plan, Variant::TDM, Scenario::Midpoint);
  CHECK(tdm.schedule.rounds == 6);
  CHECK(tdm.schedule.tiles == 7);
  CHECK(tdm.area == Approx(31.3).epsilon(0.01));
  CHECK(tdm.power == Approx(2790).epsilon(0.01));
  CHECK(tdm.latency == Approx(445.22).epsilon(0.001));
  CHECK(tdm.energy == Approx(1240).epsilon(0.01));
  const auto par = total_cost(plan, Variant::Parallel, Scenario::Midpoint);
  CHECK(par.latency == Approx(1.13).epsilon(0.01));
  CHECK(par.energy == Approx(8.12).epsilon(0.01));
  CHECK(tdm.latency / par.latency > 100);
}

TEST_CASE("report invariants") {
  const auto plan = canonical_plan();
  for (auto v : {Variant::TDM, Variant::Parallel}) {
    for (auto s : {Scenario::AllOn, Scenario::Midpoint}) {
      const auto r = total_cost(plan, v, s);
      double a = 0, p = 0, l = 0, e = 0;
      for (const auto& c : r.components) {
        a += c.area;
        p += c.power;
        l += c.latency;
        e += c.energy;
        CHECK(c.energy == Approx(c.power * c.latency * 1e-3).epsilon(1e-9));
      }
      CHECK(r.area == Approx(a));
      CHECK(r.power == Approx(p));
      CHECK(r.latency == Approx(l));
      CHECK(r.active_energy == Approx(e));
      CHECK(r.energy == Approx(r.power * r.latency * 1e-3));
    }
  }
  const auto on = total_cost(plan, Variant::TDM, Scenario::AllOn);
  const auto mid = total_cost(plan, Variant::TDM, Scenario::Midpoint);
  CHECK(mid.components.back().unit_latency > on.components.back().unit_latency);
}

TEST_CASE("area and power do not depend on the schedule") {
  const auto plan = canonical_plan();
  auto more = plan;
  for (auto& l : more.layers) {
    for (auto& s : l.sections) s.pass *= 3;
  }
  const auto a = total_cost(plan, Variant::TDM, Scenario::AllOn);
  const auto b = total_cost(more, Variant::TDM, Scenario::AllOn);
  CHECK(b.latency > a.latency);
  CHECK(b.area == a.area);
  CHECK(b.power == a.power);
}

TEST_CASE("zero-tile plan keeps only the shared components") {
  mapping::MappingPlan empty;
  const auto r = total_cost(empty, Variant::TDM, Scenario::AllOn);
  double shared_area = 0, shared_power = 0;
  for (const auto& c : component_table(Variant::TDM)) {
    shared_area += c.shared * c.unit_area;
    shared_power += c.shared * c.unit_power;
  }
  CHECK(r.area == Approx(shared_area));
  CHECK(r.power == Approx(shared_power));
  CHECK(r.latency == 0.0);
}

TEST_CASE("technology scaling") {
  const auto t = component_table(Variant::TDM);
  const auto same = scale_technology(t, {});
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(same[i].unit_area == t[i].unit_area);
  const auto half = scale_technology(t, {0.5, 1.0, 1.0});
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(half[i].unit_area == Approx(t[i].unit_area / 2));
    CHECK(half[i].unit_power == t[i].unit_power);
    CHECK(half[i].unit_latency == t[i].unit_latency);
  }
  CHECK_THROWS_AS(scale_technology(t, {0.0, 1.0, 1.0}), CostError);

  // scaling is linear: scale then total equals total then scale
  const std::vector<ComponentSpec> two(t.begin(), t.begin() + 2);
  const auto plan = canonical_plan();
  const TechnologyFactors f{0.3, 2.0, 0.7};
  const auto a = total_cost(plan, scale_technology(two, f), Variant::TDM, Scenario::AllOn);
  const auto b = total_cost(plan, two, Variant::TDM, Scenario::AllOn);
  CHECK(a.area == Approx(b.area * 0.3));
  CHECK(a.power == Approx(b.power * 2.0));
  CHECK(a.latency == Approx(b.latency * 0.7));
}

TEST_CASE("schedule must cover every component") {
  auto t = component_table(Variant::TDM);
  t.push_back({"Mystery", "", 1, 0, 1, 1, 1});
  CHECK_THROWS_WITH(total_cost(canonical_plan(), t, Variant::TDM, Scenario::AllOn),
                    Catch::Matchers::ContainsSubstring("Mystery"));
}

TEST_CASE("json overrides") {
  const auto t = component_table(Variant::TDM);
  const auto o = apply_overrides(t, nlohmann::json::parse(R"({"components":[{"name":"ADC","unit_power":5}]})"));
  CHECK(find(o, "ADC").unit_power == 5.0);
  CHECK(find(o, "DAC").unit_power == find(t, "DAC").unit_power);
  CHECK_THROWS_AS(apply_overrides(t, nlohmann::json::parse(R"({"components":[{"name":"GPU"}]})")), CostError);
  CHECK_THROWS_AS(apply_overrides(t, nlohmann::json::parse(R"({"components":[{"name":"ADC","colour":1}]})")), CostError);
}

TEST_CASE("average power mode scales by duty cycle") {
  const auto plan = canonical_plan();
  CostOptions o;
  o.power_mode = PowerMode::Average;
  const auto avg = total_cost(plan, Variant::TDM, Scenario::Midpoint, o);
  const auto worst = total_cost(plan, Variant::TDM, Scenario::Midpoint);
  CHECK(avg.power < worst.power);
  CHECK(avg.area == worst.area);
  for (std::size_t i = 0; i < avg.components.size(); ++i) {
    CHECK(avg.components[i].power ==
          Approx(worst.components[i].power * worst.components[i].latency / worst.latency));
  }
}

TEST_CASE("report output") {
  const auto r = total_cost(canonical_plan(), Variant::Parallel, Scenario::AllOn);
  const auto j = to_json(r);
  CHECK(j["variant"] == "parallel");
  CHECK(j["components"].size() == 12);
  CHECK(j["schedule"]["rounds"] == 6);
  CHECK(j["pass_accurate"]["schedule"]["kind"] == "pass-accurate");
  const auto text = to_text(r);
  CHECK(text.find("Crossbar") != std::string::npos);
  CHECK(text.find("Total") != std::string::npos);
  CHECK(parse_variant("tdm") == Variant::TDM);
  CHECK(parse_scenario("mid") == Scenario::Midpoint);
  CHECK_THROWS_AS(parse_variant("serial"), CostError);
}

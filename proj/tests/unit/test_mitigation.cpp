#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/trials.hpp"
#include "xbar/mitigation/evaluate.hpp"
#include "xbar/mitigation/offset.hpp"
#include "xbar/nn/synthetic.hpp"

using namespace xbar;
using namespace xbar::mitigation;
using crossbar::Stuck;

namespace {

// One pair on a blank tile with chosen stuck states.
struct Pair {
  std::vector<mapping::Placement> pl{mapping::Placement{"m", 0, 0, 0, 3, 4, 5}};
  std::vector<mapping::TileImage> targets{mapping::TileImage{}};
  std::vector<crossbar::StuckMap> stuck{crossbar::StuckMap{}};

  Pair(double w, Stuck sp, Stuck sm) {
    targets[0].scale = (mapping::kGOn - mapping::kGOff) / 1.0;
    const auto p = mapping::map_weight_to_pair(w, targets[0].scale);
    targets[0].at(3, 4) = p.g_plus;
    targets[0].at(3, 5) = p.g_minus;
    stuck[0].at(3, 4) = sp;
    stuck[0].at(3, 5) = sm;
  }
  double rep(const std::vector<mapping::TileImage>& t) const {
    return represented_weight(pl[0], t, stuck, {});
  }
};

}  // namespace

TEST_CASE("offsetting a single stuck device") {
  SECTION("plus stuck off, negative weight: exact") {
    Pair p(-0.4, Stuck::StuckOff, Stuck::Free);
    RepairReport r;
    const auto out = offset_stuck_weights(p.pl, p.targets, p.stuck, {}, &r);
    CHECK(p.rep(out) == Catch::Approx(-0.4));
    CHECK(r.repaired == 1);
    CHECK(r.write_passes == 1);
  }
  SECTION("plus stuck on, weight 0.3: minus raised to compensate") {
    Pair p(0.3, Stuck::StuckOn, Stuck::Free);
    const double before = p.rep(p.targets);
    CHECK(before == Catch::Approx(1.0));
    RepairReport r;
    const auto out = offset_stuck_weights(p.pl, p.targets, p.stuck, {}, &r);
    // g- = G_on - 0.3 * span
    CHECK(out[0].at(3, 5) == Catch::Approx(mapping::kGOn - 0.3 * (mapping::kGOn - mapping::kGOff)));
    CHECK(p.rep(out) == Catch::Approx(0.3));
    CHECK(r.residual[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.residual_before[0] == Catch::Approx(0.7));
  }
  SECTION("minus stuck on with a positive weight saturates") {
    Pair p(0.5, Stuck::Free, Stuck::StuckOn);
    RepairReport r;
    const auto out = offset_stuck_weights(p.pl, p.targets, p.stuck, {}, &r);
    CHECK(out[0].at(3, 4) == mapping::kGOn);
    CHECK(p.rep(out) == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.unrepairable_saturated == 1);
    CHECK(r.residual[0] == Catch::Approx(0.5));
    CHECK(r.residual_before[0] == Catch::Approx(1.0));
  }
  SECTION("both stuck is left alone") {
    Pair p(0.2, Stuck::StuckOn, Stuck::StuckOff);
    RepairReport r;
    const auto out = offset_stuck_weights(p.pl, p.targets, p.stuck, {}, &r);
    CHECK(out[0].g == p.targets[0].g);
    CHECK(r.unrepairable_both_stuck == 1);
    CHECK(r.unrepairable() == 1);
  }
}

TEST_CASE("residual never increases and baseline agrees in value") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = trials::make_tile_trial(seed, 0.1);
    RepairReport off, base;
    const auto a = offset_stuck_weights(t.placements, t.targets, t.stuck, {}, &off);
    const auto b = inner_fault_tolerance_baseline(t.placements, t.targets, t.stuck, {}, &base);
    CHECK(off.write_passes == 1);
    CHECK(base.write_passes == 2);
    for (std::size_t i = 0; i < off.residual.size(); ++i) {
      CHECK(off.residual[i] <= off.residual_before[i] + 1e-12);
      CHECK(off.residual[i] == Catch::Approx(base.residual[i]).margin(1e-12));
      const double independent = std::abs(trials::realized(t, a, t.placements[i]) - t.w[i]);
      CHECK(off.residual[i] == Catch::Approx(independent).margin(1e-12));
    }
    CHECK(trials::mean_error(t, a) < trials::mean_error(t, t.targets));
    CHECK(trials::mean_error(t, b) == Catch::Approx(trials::mean_error(t, a)).margin(1e-12));
    CHECK(off.repaired + off.unrepairable_saturated == off.one_stuck);
  }
}

TEST_CASE("report json") {
  const auto t = trials::make_tile_trial(3, 0.05);
  RepairReport r;
  offset_stuck_weights(t.placements, t.targets, t.stuck, {}, &r);
  const auto j = to_json(r);
  CHECK(j["placements"] == 64 * 32);
  CHECK(j["write_passes"] == 1);
  CHECK(!j.contains("residual"));
  CHECK(to_json(r, true)["residual"].size() == 64 * 32);
}

TEST_CASE("shape mismatch is rejected") {
  const auto t = trials::make_tile_trial(3, 0.05);
  std::vector<crossbar::StuckMap> none;
  CHECK_THROWS_AS(offset_stuck_weights(t.placements, t.targets, none, {}), mapping::MappingError);
}

TEST_CASE("evaluation rows are ordered and reproducible") {
  const auto spec = nn::canonical_network();
  const auto params = nn::random_params(spec, 7);
  const auto set = nn::synthetic_samples(spec, params, 30, 8);
  MitigationOptions o;
  o.stuck_rates = {0.0, 0.05};
  o.seeds = {5, 6};
  o.base = crossbar::NonIdealityConfig::ideal();
  const auto rows = evaluate_mitigation(spec, params, set, o);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].stuck_rate == 0.0);
  CHECK(rows[0].mode == Repair::None);
  CHECK(rows[1].mode == Repair::Offset);
  CHECK(rows[2].seed == 6);
  CHECK(rows[0].accuracy == 1.0);
  CHECK(rows[0].mean_weight_error == Catch::Approx(0.0).margin(1e-12));
  CHECK(to_csv(rows) == to_csv(evaluate_mitigation(spec, params, set, o)));
  o.threads = 3;
  CHECK(to_csv(rows) == to_csv(evaluate_mitigation(spec, params, set, o)));
  const auto csv = to_csv(rows);
  CHECK(csv.rfind("stuck_rate,seed,mitigated,accuracy,mean_weight_error\n", 0) == 0);
  const auto s = summarize(rows);
  REQUIRE(s.size() == 4);
  CHECK(s[3].mean_weight_error < s[2].mean_weight_error);
}

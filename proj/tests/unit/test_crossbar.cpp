#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "support/oracles.hpp"
#include "xbar/crossbar/config.hpp"
#include "xbar/crossbar/convert.hpp"
#include "xbar/crossbar/device.hpp"
#include "xbar/crossbar/engine.hpp"
#include "xbar/crossbar/vmm.hpp"
#include "xbar/mapping/targets.hpp"
#include "xbar/nn/layers.hpp"
#include "xbar/nn/synthetic.hpp"

using namespace xbar;
using namespace xbar::crossbar;

namespace {

double rel(const std::vector<double>& a, const std::vector<double>& b) {
  return oracle::max_abs_diff(a, b) / std::max(oracle::max_abs(b), 1e-300);
}

struct Net {
  std::size_t rows, cols;
  std::vector<double> g, v;
};

Net random_net(std::mt19937_64& rng, std::size_t max_dim = 8) {
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_real_distribution<double> gd(mapping::kGOff, mapping::kGOn), vd(-0.3, 0.3);
  Net n{dim(rng), dim(rng), {}, {}};
  n.g.resize(n.rows * n.cols);
  n.v.resize(n.rows);
  for (auto& x : n.g) x = gd(rng);
  for (auto& x : n.v) x = vd(rng);
  return n;
}

}  // namespace

TEST_CASE("single device in series with the wires") {
  const double g = 4e-5, rs = 20, rl = 2, v = 0.3;
  const std::vector<double> gv = {g}, vv = {v};
  const auto i = vmm_nonideal(gv, 1, 1, vv, rl, rs);
  CHECK_THAT(i[0], Catch::Matchers::WithinRel(v / (rs + 1.0 / g + rl), 1e-12));
}

TEST_CASE("nodal solver against dense Kirchhoff") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> r(0.5, 50.0);
  for (int t = 0; t < 60; ++t) {
    const auto n = random_net(rng);
    const double rl = r(rng), rs = r(rng);
    const bool both = t % 3 == 0;
    const auto got = vmm_nonideal(n.g, n.rows, n.cols, n.v, rl, rs, {both});
    const auto want = oracle::kirchhoff(n.g, n.rows, n.cols, n.v, rl, rs, both);
    CHECK(rel(got, want) < 1e-10);
  }
}

TEST_CASE("zero wire resistance reduces to the ideal product") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const auto n = random_net(rng);
    const auto got = vmm_nonideal(n.g, n.rows, n.cols, n.v, 0.0, 0.0);
    CHECK(rel(got, oracle::ideal(n.g, n.rows, n.cols, n.v)) < 1e-12);
    CHECK(rel(vmm_ideal(n.g, n.rows, n.cols, n.v), oracle::ideal(n.g, n.rows, n.cols, n.v)) < 1e-14);
  }
}

TEST_CASE("wire resistance only reduces current magnitude for uniform drive") {
  std::mt19937_64 rng(5);
  const auto n = random_net(rng);
  const std::vector<double> v(n.rows, 0.2);
  const auto ideal = vmm_ideal(n.g, n.rows, n.cols, v);
  const auto real = vmm_nonideal(n.g, n.rows, n.cols, v, 2.0, 20.0);
  for (std::size_t j = 0; j < n.cols; ++j) {
    CHECK(real[j] > 0.0);
    CHECK(real[j] < ideal[j]);
  }
}

TEST_CASE("solver is linear in the drive and reusable") {
  std::mt19937_64 rng(6);
  const auto n = random_net(rng);
  const NodalSolver s(n.g, n.rows, n.cols, 2.0, 20.0);
  std::vector<double> v2(n.rows);
  for (auto& x : v2) x = 0.1;
  std::vector<double> sum(n.rows);
  for (std::size_t i = 0; i < n.rows; ++i) sum[i] = 2.0 * n.v[i] - v2[i];
  const auto a = s.solve(n.v), b = s.solve(v2), c = s.solve(sum);
  for (std::size_t j = 0; j < n.cols; ++j) CHECK_THAT(c[j], Catch::Matchers::WithinAbs(2 * a[j] - b[j], 1e-15));
}

TEST_CASE("ideal vmm enforces the voltage bound") {
  const std::vector<double> g = {1e-5}, v = {0.5};
  CHECK_THROWS(vmm_ideal(g, 1, 1, v, 0.3));
}

TEST_CASE("converters") {
  const std::vector<double> x = {-2.0, -1.0, 0.0, 0.999, 1.0};
  const auto v = dac_convert(x, 6, 0.3);
  CHECK(v[0] == -0.3);
  CHECK(v[1] == -0.3);
  CHECK(v[4] == 0.3);
  CHECK(v[2] == Catch::Approx(0.3 / 63).margin(1e-15));
  const auto raw = dac_convert(x, 0, 0.3);
  CHECK(raw[3] == Catch::Approx(0.999 * 0.3));

  const std::vector<double> i = {-1e-3, 0.0, 5e-4, 1e-3};
  const auto codes = adc_convert(i, 4, 1e-3);
  CHECK(codes.front() == 0);
  CHECK(codes.back() == 15);
  CHECK(adc_sample(3e-4, 0, 1e-3) == 3e-4);
  CHECK(std::abs(adc_sample(3e-4, 6, 1e-3) - 3e-4) <= 1e-3 / 63 + 1e-18);
}

TEST_CASE("config json round trip and validation") {
  NonIdealityConfig c;
  c.adc_bits = 4;
  c.p_stuck_on = 0.02;
  c.rng_seed = 99;
  const auto back = config_from_json(to_json(c));
  CHECK(back.adc_bits == 4);
  CHECK(back.p_stuck_on == 0.02);
  CHECK(back.rng_seed == 99);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"adc_bitz", 4}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"adc_bits", "six"}}), ConfigError);
  NonIdealityConfig bad;
  bad.p_stuck_on = 0.7;
  bad.p_stuck_off = 0.7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  for (const auto& f : NonIdealityConfig::field_names()) {
    NonIdealityConfig k;
    k.set(f, 1.0);
    CHECK(k.get(f) == 1.0);
  }
  CHECK_THROWS_AS(c.set("nope", 1.0), ConfigError);
}

TEST_CASE("stuck sampling is seeded and near the requested rate") {
  NonIdealityConfig c = NonIdealityConfig::ideal();
  c.p_stuck_on = 0.05;
  c.p_stuck_off = 0.05;
  c.rng_seed = 3;
  const auto a = sample_stuck_map(c, 0), b = sample_stuck_map(c, 0), other = sample_stuck_map(c, 1);
  CHECK(a.cells == b.cells);
  CHECK(a.cells != other.cells);
  const double on = a.count(Stuck::StuckOn) / 4096.0, off = a.count(Stuck::StuckOff) / 4096.0;
  CHECK(on == Catch::Approx(0.05).margin(0.015));
  CHECK(off == Catch::Approx(0.05).margin(0.015));
}

TEST_CASE("programming applies quantization, noise, window and stuck overrides") {
  mapping::TileImage t;
  t.scale = 1e-4;
  for (std::size_t i = 0; i < t.g.size(); ++i) t.g[i] = mapping::kGOff + (i % 97) * 9e-5 / 96;
  auto c = NonIdealityConfig::ideal();
  const auto exact = program_tile(t, c, 0);
  CHECK(exact.g == t.g);

  c.write_bits = 2;
  const auto q = program_tile(t, c, 0);
  std::set<double> levels(q.g.begin(), q.g.end());
  CHECK(levels.size() == 4);

  c = NonIdealityConfig::ideal();
  c.write_sigma = 0.1;
  c.rng_seed = 4;
  const auto n1 = program_tile(t, c, 0), n2 = program_tile(t, c, 0);
  CHECK(n1.g == n2.g);
  for (double g : n1.g) {
    CHECK(g >= mapping::kGOff);
    CHECK(g <= mapping::kGOn);
  }

  c = NonIdealityConfig::ideal();
  c.g_window_scale = 0.5;
  const auto w = program_tile(t, c, 0);
  CHECK(w.g[96] == Catch::Approx(mapping::kGOff + 0.5 * 9e-5));

  c = NonIdealityConfig::ideal();
  StuckMap sm;
  sm.at(0, 0) = Stuck::StuckOn;
  sm.at(0, 1) = Stuck::StuckOff;
  const auto s = program_tile(t, c, 0, sm);
  CHECK(s.at(0, 0) == mapping::kGOn);
  CHECK(s.at(0, 1) == mapping::kGOff);
}

TEST_CASE("ideal accelerator reproduces the float network") {
  const auto spec = nn::canonical_network();
  const auto cfg = NonIdealityConfig::ideal();
  for (auto scheme : {mapping::Scheme::WeightStationary, mapping::Scheme::Staggered}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto params = nn::random_params(spec, seed);
      mapping::CompileOptions o;
      o.tile_budget = 1000;
      const auto plan = mapping::compile_network(spec, params, scheme, o);
      const auto tiles = program_tiles(mapping::compute_targets(plan, params), cfg);
      const Accelerator acc(plan, tiles, cfg);
      const auto set = nn::synthetic_samples(spec, params, 3, seed + 100, 0.0);
      for (const auto& x : set.samples) {
        CHECK(rel(acc.forward(x), nn::forward(spec, params, x)) < 1e-9);
      }
    }
  }
}

TEST_CASE("accelerator rejects a tile count mismatch") {
  const auto spec = nn::canonical_network();
  const auto params = nn::random_params(spec, 1);
  const auto plan = mapping::compile_network(spec, params, mapping::Scheme::WeightStationary);
  std::vector<CrossbarTile> tiles(3);
  CHECK_THROWS_WITH(Accelerator(plan, tiles, NonIdealityConfig::ideal()),
                    Catch::Matchers::ContainsSubstring("mismatch"));
}

TEST_CASE("6-bit nodal inference agrees with the float network on most samples") {
  const auto spec = nn::canonical_network();
  const auto params = nn::random_params(spec, 7);
  const auto set = nn::synthetic_samples(spec, params, 20, 8);
  auto plan = mapping::compile_network(spec, params, mapping::Scheme::WeightStationary);
  mapping::calibrate_input_full_scale(plan, params, set.samples);
  NonIdealityConfig cfg;
  ExecutionOptions o;
  o.adc_range = AdcRange::Calibrated;
  Accelerator acc(plan, program_tiles(mapping::compute_targets(plan, params), cfg), cfg, o);
  acc.calibrate_adc(set.samples);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < set.size(); ++i) agree += nn::argmax(acc.forward(set.samples[i])) == (*set.labels)[i];
  CHECK(agree >= 17);
}

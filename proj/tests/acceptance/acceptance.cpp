// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "support/trials.hpp"
#include "xbar/cli/app.hpp"
#include "xbar/cost/model.hpp"
#include "xbar/crossbar/engine.hpp"
#include "xbar/crossbar/vmm.hpp"
#include "xbar/mapping/plan.hpp"
#include "xbar/mapping/targets.hpp"
#include "xbar/mitigation/evaluate.hpp"
#include "xbar/mitigation/offset.hpp"
#include "xbar/nn/layers.hpp"
#include "xbar/nn/quantize.hpp"
#include "xbar/nn/synthetic.hpp"

using namespace xbar;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

std::string num(double x) {
  char b[48];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

// --- criteria -----------------------------------------------------------

Check parameter_count() {
  Check c;
  const auto n = nn::count_parameters(nn::canonical_network());
  c.require(n == 10778, "count " + std::to_string(n));
  return c;
}

Check mapping_budgets() {
  Check c;
  auto geom = [](std::size_t k) {
    mapping::ConvGeometry g;
    g.n_filters = 32;
    g.kernel_len = k;
    g.input_len = 64;
    return g;
  };
  struct Row {
    const char* name;
    std::size_t k, a, b, ratio;
  };
  for (const Row r : {Row{"conv1", 32, 69696, 2112, 33}, Row{"conv2", 30, 69440, 1984, 35}}) {
    const auto cmp = mapping::compare_schemes(geom(r.k));
    c.require(cmp.staggered.cells_used == r.a,
              std::string(r.name) + " a=" + std::to_string(cmp.staggered.cells_used));
    c.require(cmp.weight_stationary.cells_used == r.b,
              std::string(r.name) + " b=" + std::to_string(cmp.weight_stationary.cells_used));
    c.require(cmp.area_reduction == static_cast<double>(r.ratio),
              std::string(r.name) + " ratio=" + num(cmp.area_reduction));
  }
  const auto fc1 = mapping::plan_fc(1088, 8).budget.cells_used;
  const auto fc2 = mapping::plan_fc(8, 2).budget.cells_used;
  c.require(fc1 == 17424, "fc1=" + std::to_string(fc1));
  c.require(fc2 == 36, "fc2=" + std::to_string(fc2));
  return c;
}

Check ideal_equivalence() {
  Check c;
  const auto spec = nn::canonical_network();
  const auto cfg = crossbar::NonIdealityConfig::ideal();
  double worst = 0.0;
  for (auto scheme : {mapping::Scheme::WeightStationary, mapping::Scheme::Staggered}) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto params = nn::random_params(spec, 1000 + i);
      std::mt19937_64 rng(2000 + i);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> x(spec.input_length);
      for (auto& v : x) v = u(rng);
      mapping::CompileOptions o;
      o.tile_budget = 1000;
      const auto plan = mapping::compile_network(spec, params, scheme, o);
      const auto tiles = crossbar::program_tiles(mapping::compute_targets(plan, params), cfg);
      const auto got = crossbar::execute_network(plan, tiles, x, cfg);
      const auto want = nn::forward(spec, params, x);
      const double rel = oracle::max_abs_diff(got, want) / std::max(oracle::max_abs(want), 1e-300);
      worst = std::max(worst, rel);
    }
  }
  c.require(worst <= 1e-6, "worst relative error " + num(worst));
  c.detail = c.ok ? "worst relative error " + num(worst) : c.detail;
  return c;
}

Check nodal_oracle() {
  Check c;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  std::uniform_real_distribution<double> gd(mapping::kGOff, mapping::kGOn), vd(-0.3, 0.3),
      rd(0.1, 100.0);
  double worst_k = 0.0, worst_i = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    std::vector<double> g(rows * cols), v(rows);
    for (auto& x : g) x = gd(rng);
    for (auto& x : v) x = vd(rng);
    const double rl = rd(rng), rs = rd(rng);
    const auto got = crossbar::vmm_nonideal(g, rows, cols, v, rl, rs);
    const auto want = oracle::kirchhoff(g, rows, cols, v, rl, rs);
    worst_k = std::max(worst_k, oracle::max_abs_diff(got, want) / oracle::max_abs(want));
    const auto zero = crossbar::vmm_nonideal(g, rows, cols, v, 0.0, 0.0);
    const auto ideal = crossbar::vmm_ideal(g, rows, cols, v);
    worst_i = std::max(worst_i, oracle::max_abs_diff(zero, ideal) / oracle::max_abs(ideal));
  }
  c.require(worst_k <= 1e-8, "kirchhoff rel " + num(worst_k));
  c.require(worst_i <= 1e-9, "ideal rel " + num(worst_i));
  if (c.ok) c.detail = "kirchhoff rel " + num(worst_k) + ", ideal rel " + num(worst_i);
  return c;
}

Check quantizer_properties() {
  Check c;
  const nn::Quantizer q(6, -1.0, 1.0);
  std::vector<double> levels;
  for (std::uint64_t k = 0; k < q.levels(); ++k) levels.push_back(q.level(k));
  c.require(levels.size() == 64, "levels");
  for (std::size_t k = 1; k < levels.size(); ++k) c.require(levels[k] > levels[k - 1], "level order");
  for (double l : levels) c.require(q(l) == l, "level not fixed");
  // Every input between and around levels: idempotent, monotone, half-step.
  double prev = -INFINITY;
  const double step = 2.0 / 63.0;
  for (long i = -70000; i <= 70000; ++i) {
    const double x = static_cast<double>(i) / 63000.0;
    const double y = q(x);
    if (q(y) != y) c.require(false, "idempotence at " + num(x));
    if (y < prev) c.require(false, "monotonicity at " + num(x));
    if (std::abs(x) <= 1.0 && std::abs(y - x) > step / 2 + 1e-15) c.require(false, "error at " + num(x));
    if (std::find(levels.begin(), levels.end(), y) == levels.end()) c.require(false, "off-grid output");
    prev = y;
    if (!c.ok) break;
  }
  return c;
}

Check offsetting() {
  Check c;
  std::size_t better = 0;
  bool never_worse = true;
  std::size_t passes_off = 0, passes_base = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto t = trials::make_tile_trial(seed, 0.05);
    mitigation::RepairReport off, base;
    const auto a = mitigation::offset_stuck_weights(t.placements, t.targets, t.stuck, {}, &off);
    mitigation::inner_fault_tolerance_baseline(t.placements, t.targets, t.stuck, {}, &base);
    better += trials::mean_error(t, a) < trials::mean_error(t, t.targets);
    for (const auto& p : t.placements) {
      const double after = std::abs(trials::realized(t, a, p) - t.w[p.index]);
      const double before = std::abs(trials::realized(t, t.targets, p) - t.w[p.index]);
      if (after > before + 1e-12) never_worse = false;
    }
    passes_off = off.write_passes;
    passes_base = base.write_passes;
  }
  c.require(better >= 95, "improved in " + std::to_string(better) + "/100");
  c.require(never_worse, "a residual increased");
  c.require(passes_off == 1 && passes_base == 2,
            "write passes " + std::to_string(passes_off) + " vs " + std::to_string(passes_base));

  // Synthetic task accuracy, averaged over seeds 5-9.
  const auto spec = nn::canonical_network();
  const auto params = nn::random_params(spec, 7);
  const auto set = nn::synthetic_samples(spec, params, 200, 8);
  mitigation::MitigationOptions o;
  o.stuck_rates = {0.01, 0.05, 0.10};
  o.seeds = {5, 6, 7, 8, 9};
  o.base.r_line = 0.0;
  o.base.r_source = 0.0;
  o.exec.adc_range = crossbar::AdcRange::Calibrated;
  const auto summary = mitigation::summarize(mitigation::evaluate_mitigation(spec, params, set, o));
  std::string acc;
  for (std::size_t i = 0; i + 1 < summary.size(); i += 2) {
    const auto& none = summary[i];
    const auto& fix = summary[i + 1];
    c.require(fix.mean_accuracy >= none.mean_accuracy, "rate " + num(none.stuck_rate));
    acc += (acc.empty() ? "" : ", ") + num(none.stuck_rate) + ": " + num(none.mean_accuracy) + "->" +
           num(fix.mean_accuracy);
  }
  const std::string head = "improved " + std::to_string(better) + "/100; accuracy " + acc;
  c.detail = c.detail.empty() ? head : head + "; " + c.detail;
  return c;
}

Check cost_model() {
  Check c;
  const auto spec = nn::canonical_network();
  const auto plan =
      mapping::compile_network(spec, nn::zero_params(spec), mapping::Scheme::WeightStationary);
  using cost::Scenario;
  using cost::Variant;
  const auto tdm = cost::total_cost(plan, Variant::TDM, Scenario::Midpoint);
  const auto par = cost::total_cost(plan, Variant::Parallel, Scenario::Midpoint);
  const auto tdm_on = cost::total_cost(plan, Variant::TDM, Scenario::AllOn);
  const auto par_on = cost::total_cost(plan, Variant::Parallel, Scenario::AllOn);
  for (const auto* r : {&tdm, &tdm_on}) {
    c.require(within(r->area, 31.3, 0.01), "TDM area " + num(r->area));
    c.require(within(r->power, 2790, 0.01), "TDM power " + num(r->power));
  }
  for (const auto* r : {&par, &par_on}) {
    c.require(within(r->area, 322, 0.01), "parallel area " + num(r->area));
    c.require(within(r->power, 7210, 0.01), "parallel power " + num(r->power));
  }
  const double on = cost::crossbar_pass_latency(Scenario::AllOn);
  const double mid = cost::crossbar_pass_latency(Scenario::Midpoint);
  c.require(std::abs(on - 2.03e-3) <= 1e-15, "AllOn pass " + num(on));
  c.require(std::abs(mid - 6.07e-3) <= 1e-15, "Midpoint pass " + num(mid));
  c.require(within(tdm.latency, 445, 0.10), "TDM latency " + num(tdm.latency));
  c.require(within(tdm.energy, 1240, 0.10), "TDM energy " + num(tdm.energy));
  c.require(within(par.latency, 1.13, 0.10), "parallel latency " + num(par.latency));
  c.require(within(par.energy, 8.12, 0.10), "parallel energy " + num(par.energy));
  c.require(tdm.latency / par.latency > 100, "latency ratio " + num(tdm.latency / par.latency));
  if (c.ok) {
    c.detail = "TDM " + num(tdm.area) + " mm2 " + num(tdm.power) + " mW " + num(tdm.latency) + " us " +
               num(tdm.energy) + " uJ; parallel " + num(par.area) + " mm2 " + num(par.power) +
               " mW " + num(par.latency) + " us " + num(par.energy) + " uJ";
  }
  return c;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xbarsim");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Check determinism() {
  Check c;
  const auto dir = fs::temp_directory_path() / "xbar_acceptance_determinism";
  std::ostringstream sink;
  auto* saved = std::cerr.rdbuf(sink.rdbuf());
  struct Restore {
    std::streambuf* buf;
    ~Restore() { std::cerr.rdbuf(buf); }
  } restore{saved};
  fs::remove_all(dir);
  c.require(cli({"synth", "--count", "24", "--seed", "13", "--out", dir.string()}) == 0, "synth");
  const auto w = (dir / "weights.mxw").string(), x = (dir / "inputs.mxi").string();
  std::ofstream(dir / "cfg.json") << R"({"write_sigma": 0.05, "p_stuck_on": 0.01, "p_stuck_off": 0.01})";
  const auto cfg = (dir / "cfg.json").string();
  for (const char* run : {"r1", "r2"}) {
    const auto out = (dir / run).string();
    c.require(cli({"plan", "--weights", w, "--out", out}) == 0, "plan");
    c.require(cli({"cost", "--weights", w, "--variant", "parallel", "--out", out}) == 0, "cost");
    c.require(cli({"infer", "--weights", w, "--inputs", x, "--config", cfg, "--seed", "5", "--hours",
                   "1", "--out", out}) == 0,
              "infer");
    c.require(cli({"sweep", "--weights", w, "--inputs", x, "--config", cfg, "--knob", "adc_bits",
                   "--values", "4,6", "--trials", "2", "--out", out}) == 0,
              "sweep");
    c.require(cli({"mitigate", "--weights", w, "--inputs", x, "--config", cfg, "--stuck-rates",
                   "0.05", "--trials", "2", "--baseline", "--out", out}) == 0,
              "mitigate");
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "r1")) {
    const auto other = dir / "r2" / e.path().filename();
    c.require(fs::exists(other) && slurp(e.path()) == slurp(other),
              e.path().filename().string() + " differs");
    ++files;
  }
  c.require(files == 9, std::to_string(files) + " output files");
  if (c.ok) c.detail = std::to_string(files) + " files identical across reruns";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"parameter-count", parameter_count},   {"mapping-budgets", mapping_budgets},
      {"ideal-path-equivalence", ideal_equivalence}, {"nodal-solver-oracle", nodal_oracle},
      {"quantizer-properties", quantizer_properties}, {"stuck-weight-offsetting", offsetting},
      {"cost-model", cost_model},              {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", name, s, c.detail.empty() ? "" : ": ",
                c.detail.c_str());
    std::fflush(stdout);
    failures += !c.ok;
  }
  return failures;
}

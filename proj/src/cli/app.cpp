#include "xbar/cli/app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "xbar/cli/metrics.hpp"
#include "xbar/cost/model.hpp"
#include "xbar/crossbar/config.hpp"
#include "xbar/crossbar/engine.hpp"
#include "xbar/mapping/plan_json.hpp"
#include "xbar/mapping/targets.hpp"
#include "xbar/mitigation/evaluate.hpp"
#include "xbar/nn/layers.hpp"
#include "xbar/nn/synthetic.hpp"
#include "xbar/nn/weights_io.hpp"
#include "xbar/util/parallel.hpp"

namespace xbar::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << data;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cerr << "wrote " << path.string() << "\n";
}

struct Network {
  nn::NetworkSpec spec;
  nn::NetworkParams params;
};

Network load_network(const fs::path& path) {
  if (path.empty()) throw std::runtime_error("--weights is required");
  Network n;
  n.params = nn::read_weights(path);
  n.spec = nn::infer_spec(n.params);
  return n;
}

nn::SampleSet load_inputs(const fs::path& path, const nn::NetworkSpec& spec, bool need_labels) {
  if (path.empty()) throw std::runtime_error("--inputs is required");
  auto set = nn::read_samples(path);
  if (set.length != spec.input_length) {
    throw std::runtime_error(path.string() + ": samples have length " + std::to_string(set.length) +
                             ", network expects " + std::to_string(spec.input_length));
  }
  if (need_labels && !set.labels) throw std::runtime_error(path.string() + ": no labels");
  return set;
}

crossbar::NonIdealityConfig base_config(const RunConfig& rc) {
  if (rc.ideal) return crossbar::NonIdealityConfig::ideal();
  crossbar::NonIdealityConfig cfg;
  if (!rc.config.empty()) cfg = crossbar::load_config(rc.config);
  return cfg;
}

crossbar::ExecutionOptions exec_options(const RunConfig& rc) {
  crossbar::ExecutionOptions o;
  if (rc.adc_range == "calibrated") o.adc_range = crossbar::AdcRange::Calibrated;
  else if (rc.adc_range == "worst") o.adc_range = crossbar::AdcRange::WorstCase;
  else throw std::runtime_error("--adc-range must be worst or calibrated");
  return o;
}

std::vector<std::uint64_t> seeds(const RunConfig& rc) {
  if (rc.trials < 1) throw std::runtime_error("--trials must be >= 1");
  std::vector<std::uint64_t> s(rc.trials);
  std::iota(s.begin(), s.end(), rc.seed.value_or(5));
  return s;
}

mapping::MappingPlan calibrated_plan(const Network& net, const RunConfig& rc,
                                     const nn::SampleSet& set) {
  mapping::CompileOptions co;
  co.tile_budget = rc.tile_budget;
  auto plan = mapping::compile_network(net.spec, net.params, mapping::parse_scheme(rc.scheme), co);
  mapping::calibrate_input_full_scale(plan, net.params, set.samples);
  return plan;
}

crossbar::Accelerator build(const mapping::MappingPlan& plan, const nn::NetworkParams& params,
                            const crossbar::NonIdealityConfig& cfg,
                            const crossbar::ExecutionOptions& opts, const nn::SampleSet& set) {
  const auto targets = mapping::compute_targets(plan, params);
  crossbar::Accelerator acc(plan, crossbar::program_tiles(targets, cfg), cfg, opts);
  if (opts.adc_range == crossbar::AdcRange::Calibrated) acc.calibrate_adc(set.samples);
  return acc;
}

double accuracy(const crossbar::Accelerator& acc, const nn::SampleSet& set) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    ok += nn::argmax(acc.forward(set.samples[i])) == (*set.labels)[i];
  }
  return set.size() ? static_cast<double>(ok) / static_cast<double>(set.size()) : 0.0;
}

// "stuck_rate" splits evenly into p_stuck_on / p_stuck_off.
void set_knob(crossbar::NonIdealityConfig& cfg, const std::string& knob, double v) {
  if (knob == "stuck_rate") {
    cfg.p_stuck_on = v / 2.0;
    cfg.p_stuck_off = v / 2.0;
  } else {
    cfg.set(knob, v);
  }
}

}  // namespace

void cmd_infer(const RunConfig& rc) {
  const auto net = load_network(rc.weights);
  const auto set = load_inputs(rc.inputs, net.spec, false);
  auto cfg = base_config(rc);
  if (rc.seed) cfg.rng_seed = *rc.seed;
  cfg.validate();
  const auto plan = calibrated_plan(net, rc, set);
  const auto acc = build(plan, net.params, cfg, exec_options(rc), set);

  std::ostringstream csv;
  csv << "index,logit0,logit1,class" << (set.labels ? ",label" : "") << "\n";
  std::vector<std::uint8_t> pred;
  std::vector<double> score;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto y = acc.forward(set.samples[i]);
    pred.push_back(static_cast<std::uint8_t>(nn::argmax(y)));
    score.push_back(y.size() > 1 ? y[1] - y[0] : y[0]);
    csv << i;
    for (double v : y) csv << "," << fmt(v);
    csv << "," << int(pred.back());
    if (set.labels) csv << "," << int((*set.labels)[i]);
    csv << "\n";
  }
  write_file(rc.out / "predictions.csv", csv.str());
  if (set.labels) {
    const auto m = compute_metrics(pred, score, *set.labels, rc.hours);
    write_file(rc.out / "metrics.json", to_json(m).dump(2) + "\n");
    std::cerr << "accuracy " << m.accuracy << "\n";
  }
}

void cmd_sweep(const RunConfig& rc) {
  const auto net = load_network(rc.weights);
  const auto set = load_inputs(rc.inputs, net.spec, true);
  const auto& names = crossbar::NonIdealityConfig::field_names();
  if (rc.knob != "stuck_rate" && std::find(names.begin(), names.end(), rc.knob) == names.end()) {
    std::string known = "stuck_rate";
    for (const auto& n : names) known += ", " + n;
    throw std::runtime_error("unknown knob '" + rc.knob + "' (known: " + known + ")");
  }
  if (rc.values.empty()) throw std::runtime_error("--values is empty");
  const auto base = base_config(rc);
  const auto opts = exec_options(rc);
  const auto seed_list = seeds(rc);
  const auto plan = calibrated_plan(net, rc, set);

  const std::size_t n_seeds = seed_list.size();
  std::vector<double> acc(rc.values.size() * n_seeds);
  util::parallel_for(acc.size(), rc.threads, [&](std::size_t i) {
    auto cfg = base;
    set_knob(cfg, rc.knob, rc.values[i / n_seeds]);
    cfg.rng_seed = seed_list[i % n_seeds];
    cfg.validate();
    acc[i] = accuracy(build(plan, net.params, cfg, opts, set), set);
  });

  std::ostringstream csv;
  csv << "knob,value,mean_accuracy,std_accuracy,seeds\n";
  for (std::size_t v = 0; v < rc.values.size(); ++v) {
    double mean = 0.0;
    for (std::size_t s = 0; s < n_seeds; ++s) mean += acc[v * n_seeds + s];
    mean /= static_cast<double>(n_seeds);
    double var = 0.0;
    for (std::size_t s = 0; s < n_seeds; ++s) var += std::pow(acc[v * n_seeds + s] - mean, 2);
    var /= static_cast<double>(n_seeds);
    csv << rc.knob << "," << fmt(rc.values[v]) << "," << fmt(mean) << "," << fmt(std::sqrt(var))
        << "," << n_seeds << "\n";
  }
  write_file(rc.out / "sweep.csv", csv.str());
}

void cmd_cost(const RunConfig& rc) {
  Network net;
  if (rc.weights.empty()) {
    net.spec = nn::canonical_network();
    net.params = nn::zero_params(net.spec);
  } else {
    net = load_network(rc.weights);
  }
  mapping::CompileOptions co;
  co.tile_budget = rc.tile_budget;
  const auto plan = mapping::compile_network(net.spec, net.params, mapping::parse_scheme(rc.scheme), co);
  const auto variant = cost::parse_variant(rc.variant);
  const auto scenario = cost::parse_scenario(rc.scenario);
  auto table = cost::component_table(variant, scenario);
  if (!rc.cost_table.empty()) table = cost::load_overrides(std::move(table), rc.cost_table);

  cost::CostOptions opts;
  if (rc.power_mode == "average") opts.power_mode = cost::PowerMode::Average;
  else if (rc.power_mode != "worst") throw std::runtime_error("--power must be worst or average");
  if (!rc.config.empty()) {
    const auto cfg = crossbar::load_config(rc.config);
    opts.r_line = cfg.r_line;
    opts.r_source = cfg.r_source;
  }
  const auto report = cost::total_cost(plan, table, variant, scenario, opts);
  write_file(rc.out / "cost.json", cost::to_json(report).dump(2) + "\n");
  write_file(rc.out / "cost.txt", cost::to_text(report));
}

void cmd_plan(const RunConfig& rc) {
  const auto net = load_network(rc.weights);
  mapping::CompileOptions co;
  co.tile_budget = rc.tile_budget;
  const auto plan = mapping::compile_network(net.spec, net.params, mapping::parse_scheme(rc.scheme), co);
  write_file(rc.out / "plan.json", mapping::plan_to_json(plan).dump(2) + "\n");

  std::ostringstream t;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %14s %14s %10s %8s\n", "Layer", "Scheme (a)", "Scheme (b)",
                "Reduction", "Passes");
  t << buf;
  for (const auto& l : plan.layers) {
    if (l.role == mapping::LayerRole::Conv) {
      const auto c = mapping::compare_schemes(l.conv);
      std::snprintf(buf, sizeof buf, "%-8s %14zu %14zu %9.3gx %8zu\n", l.layer.c_str(),
                    c.staggered.cells_used, c.weight_stationary.cells_used, c.area_reduction,
                    c.weight_stationary.pass_count);
    } else {
      std::snprintf(buf, sizeof buf, "%-8s %14zu %14zu %10s %8zu\n", l.layer.c_str(),
                    l.budget.cells_used, l.budget.cells_used, "-", l.budget.pass_count);
    }
    t << buf;
  }
  std::snprintf(buf, sizeof buf, "tiles %zu, cells %zu (scheme %s)\n", plan.tile_count(),
                plan.cells_used(), std::string(mapping::to_string(plan.scheme)).c_str());
  t << buf;
  write_file(rc.out / "budget.txt", t.str());
}

void cmd_mitigate(const RunConfig& rc) {
  const auto net = load_network(rc.weights);
  const auto set = load_inputs(rc.inputs, net.spec, true);
  mitigation::MitigationOptions o;
  o.stuck_rates = rc.stuck_rates;
  o.seeds = seeds(rc);
  if (rc.baseline) o.modes.push_back(mitigation::Repair::Baseline);
  o.base = base_config(rc);
  o.exec = exec_options(rc);
  o.scheme = mapping::parse_scheme(rc.scheme);
  o.threads = rc.threads;
  const auto rows = mitigation::evaluate_mitigation(net.spec, net.params, set, o);
  write_file(rc.out / "mitigation.csv", mitigation::to_csv(rows));

  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    if (r.mode == mitigation::Repair::None) continue;
    auto e = mitigation::to_json(r.report);
    e["stuck_rate"] = r.stuck_rate;
    e["seed"] = r.seed;
    e["mode"] = mitigation::to_string(r.mode);
    j.push_back(e);
  }
  write_file(rc.out / "repair.json", j.dump(2) + "\n");
  for (const auto& s : mitigation::summarize(rows)) {
    std::cerr << "stuck " << s.stuck_rate << " " << mitigation::to_string(s.mode) << ": accuracy "
              << s.mean_accuracy << "\n";
  }
}

void cmd_synth(const RunConfig& rc) {
  const auto spec = nn::canonical_network();
  const std::uint64_t seed = rc.seed.value_or(7);
  const auto params = nn::random_params(spec, seed);
  const auto set = nn::synthetic_samples(spec, params, rc.count, seed + 1);
  fs::create_directories(rc.out);
  nn::write_weights(rc.out / "weights.mxw", params);
  nn::write_samples(rc.out / "inputs.mxi", set);
  std::cerr << "wrote " << (rc.out / "weights.mxw").string() << ", "
            << (rc.out / "inputs.mxi").string() << "\n";
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Memristive crossbar CNN simulator"};
  app.require_subcommand(1);
  RunConfig rc;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* c) {
    c->add_option("--out", rc.out, "output directory");
    c->add_option("--scheme", rc.scheme, "staggered or stationary")
        ->check(CLI::IsMember({"staggered", "stationary", "a", "b"}));
    c->add_option("--tile-budget", rc.tile_budget, "maximum tiles a plan may use");
  };
  auto run_opts = [&](CLI::App* c) {
    c->add_option("--weights", rc.weights, "MXW1 weight file")->required()->check(CLI::ExistingFile);
    c->add_option("--inputs", rc.inputs, "MXI1 sample file")->required()->check(CLI::ExistingFile);
    c->add_option("--config", rc.config, "non-ideality JSON")->check(CLI::ExistingFile);
    c->add_flag("--ideal", rc.ideal, "disable every non-ideality");
    c->add_option("--adc-range", rc.adc_range, "worst or calibrated")
        ->check(CLI::IsMember({"worst", "calibrated"}));
    c->add_option("--seed", seed, "seed (first seed for multi-seed commands)");
    c->add_option("--threads", rc.threads, "worker threads, 0 = all cores");
    common(c);
  };

  auto* infer = app.add_subcommand("infer", "run inference, write predictions and metrics");
  run_opts(infer);
  infer->add_option("--hours", rc.hours, "recording duration for FP/hour");

  auto* sweep = app.add_subcommand("sweep", "accuracy across values of one knob");
  run_opts(sweep);
  sweep->add_option("--knob", rc.knob, "config field or stuck_rate")->required();
  sweep->add_option("--values", rc.values, "values to sweep")->required()->delimiter(',');
  sweep->add_option("--trials", rc.trials, "number of seeds")->check(CLI::PositiveNumber);

  auto* mitigate = app.add_subcommand("mitigate", "accuracy with and without offsetting");
  run_opts(mitigate);
  mitigate->add_option("--stuck-rates", rc.stuck_rates, "total stuck rates")->delimiter(',');
  mitigate->add_option("--trials", rc.trials, "number of seeds")->check(CLI::PositiveNumber);
  mitigate->add_flag("--baseline", rc.baseline, "also run the two-pass baseline");

  auto* cost = app.add_subcommand("cost", "power, area, latency and energy report");
  cost->add_option("--weights", rc.weights, "MXW1 weight file (default: canonical network)")
      ->check(CLI::ExistingFile);
  cost->add_option("--variant", rc.variant, "tdm or parallel")
      ->check(CLI::IsMember({"tdm", "parallel"}));
  cost->add_option("--scenario", rc.scenario, "on or mid")->check(CLI::IsMember({"on", "mid"}));
  cost->add_option("--table", rc.cost_table, "component override JSON")->check(CLI::ExistingFile);
  cost->add_option("--power", rc.power_mode, "worst or average")
      ->check(CLI::IsMember({"worst", "average"}));
  cost->add_option("--config", rc.config, "non-ideality JSON (r_line, r_source)")
      ->check(CLI::ExistingFile);
  common(cost);

  auto* plan = app.add_subcommand("plan", "compile a mapping plan and budget table");
  plan->add_option("--weights", rc.weights, "MXW1 weight file")->required()->check(CLI::ExistingFile);
  common(plan);

  auto* synth = app.add_subcommand("synth", "write a random network and labelled inputs");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--count", rc.count, "number of samples")->check(CLI::PositiveNumber);
  synth->add_option("--out", rc.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, std::cerr, std::cerr);
  }
  for (auto* c : app.get_subcommands()) {
    if (auto* o = c->get_option_no_throw("--seed"); o && o->count()) rc.seed = seed;
  }

  try {
    if (infer->parsed()) cmd_infer(rc);
    else if (sweep->parsed()) cmd_sweep(rc);
    else if (mitigate->parsed()) cmd_mitigate(rc);
    else if (cost->parsed()) cmd_cost(rc);
    else if (plan->parsed()) cmd_plan(rc);
    else if (synth->parsed()) cmd_synth(rc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace xbar::cli

#include "xbar/mitigation/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "xbar/mapping/targets.hpp"
#include "xbar/nn/layers.hpp"
#include "xbar/util/parallel.hpp"

namespace xbar::mitigation {

std::string to_string(Repair r) {
  switch (r) {
    case Repair::None: return "none";
    case Repair::Offset: return "offset";
    case Repair::Baseline: return "baseline";
  }
  return "?";
}

namespace {

double programmed_error(std::span<const mapping::Placement> pl,
                        std::span<const mapping::TileImage> targets,
                        std::span<const crossbar::CrossbarTile> tiles) {
  if (pl.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pl) {
    const auto& t = targets[p.tile];
    const auto& x = tiles[p.tile];
    const double want = (t.at(p.row, p.col_plus) - t.at(p.row, p.col_minus)) / t.scale;
    const double got = (x.at(p.row, p.col_plus) - x.at(p.row, p.col_minus)) / x.scale;
    sum += std::abs(got - want);
  }
  return sum / static_cast<double>(pl.size());
}

}  // namespace

std::vector<MitigationRow> evaluate_mitigation(const nn::NetworkSpec& spec,
                                               const nn::NetworkParams& params,
                                               const nn::SampleSet& samples,
                                               const MitigationOptions& options) {
  if (!samples.labels) throw nn::FormatError("evaluate_mitigation: samples carry no labels");
  options.base.validate();

  mapping::MappingPlan plan = mapping::compile_network(spec, params, options.scheme);
  if (options.calibrate_dac) mapping::calibrate_input_full_scale(plan, params, samples.samples);
  const auto targets = mapping::compute_targets(plan, params);
  const auto pl = mapping::placements(plan);

  struct Task {
    double rate;
    std::uint64_t seed;
    Repair mode;
  };
  std::vector<Task> tasks;
  for (double r : options.stuck_rates)
    for (auto s : options.seeds)
      for (auto m : options.modes) tasks.push_back({r, s, m});

  std::vector<MitigationRow> rows(tasks.size());
  util::parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    crossbar::NonIdealityConfig cfg = options.base;
    cfg.p_stuck_on = task.rate / 2.0;
    cfg.p_stuck_off = task.rate / 2.0;
    cfg.rng_seed = task.seed;
    cfg.validate();
    const auto stuck = crossbar::sample_stuck_maps(cfg, plan.tile_count());

    MitigationRow row;
    row.stuck_rate = task.rate;
    row.seed = task.seed;
    row.mode = task.mode;
    std::vector<mapping::TileImage> written = targets;
    if (task.mode == Repair::Offset) {
      written = offset_stuck_weights(pl, targets, stuck, {}, &row.report);
    } else if (task.mode == Repair::Baseline) {
      written = inner_fault_tolerance_baseline(pl, targets, stuck, {}, &row.report);
    }
    auto tiles = crossbar::program_tiles(written, cfg, stuck);
    row.mean_weight_error = programmed_error(pl, targets, tiles);

    crossbar::Accelerator acc(plan, std::move(tiles), cfg, options.exec);
    if (options.exec.adc_range == crossbar::AdcRange::Calibrated) acc.calibrate_adc(samples.samples);
    std::size_t correct = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const auto y = acc.forward(samples.samples[k]);
      correct += nn::argmax(y) == (*samples.labels)[k];
    }
    row.accuracy = samples.size() ? static_cast<double>(correct) / samples.size() : 0.0;
    rows[i] = std::move(row);
  });
  return rows;
}

std::string to_csv(const std::vector<MitigationRow>& rows) {
  std::ostringstream os;
  os << "stuck_rate,seed,mitigated,accuracy,mean_weight_error\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%llu,%s,%.6f,%.9g\n", r.stuck_rate,
                  static_cast<unsigned long long>(r.seed), to_string(r.mode).c_str(), r.accuracy,
                  r.mean_weight_error);
    os << buf;
  }
  return os.str();
}

std::vector<MitigationSummary> summarize(const std::vector<MitigationRow>& rows) {
  std::vector<MitigationSummary> out;
  std::vector<std::size_t> counts;
  for (const auto& r : rows) {
    std::size_t k = 0;
    while (k < out.size() && !(out[k].stuck_rate == r.stuck_rate && out[k].mode == r.mode)) ++k;
    if (k == out.size()) {
      out.push_back({r.stuck_rate, r.mode, 0.0, 0.0});
      counts.push_back(0);
    }
    out[k].mean_accuracy += r.accuracy;
    out[k].mean_weight_error += r.mean_weight_error;
    ++counts[k];
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].mean_accuracy /= static_cast<double>(counts[k]);
    out[k].mean_weight_error /= static_cast<double>(counts[k]);
  }
  return out;
}

}  // namespace xbar::mitigation

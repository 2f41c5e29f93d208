#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "cmcmc/errors.hpp"
#include "cmcmc/harness.hpp"

namespace cmcmc {

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  return k % 2 == 1 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

double loglog_slope(const std::vector<std::pair<std::size_t, double>>& trace,
                    double lo, double hi, bool* clamped) {
  constexpr double kFloor = 1e-300;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [t, value] : trace) {
    const auto tt = static_cast<double>(t);
    if (tt < lo || tt > hi) continue;
    double v = value;
    if (!(v >= kFloor)) {
      v = kFloor;
      if (clamped) *clamped = true;
    }
    xs.push_back(std::log(tt));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 2) {
    throw InvalidArgument("slope window holds fewer than two points");
  }
  const double n = static_cast<double>(xs.size());
  double x_bar = 0.0;
  double y_bar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_bar += xs[i];
    y_bar += ys[i];
  }
  x_bar /= n;
  y_bar /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_bar) * (xs[i] - x_bar);
    sxy += (xs[i] - x_bar) * (ys[i] - y_bar);
  }
  return sxy / sxx;
}

RateResult rate_experiment(const RunConfig& base, const RateOptions& options,
                           std::vector<RunRecord>* records) {
  if (base.model.kind != ModelKind::gaussian_location) {
    throw UnsupportedModel("the rate experiment needs the Gaussian location model");
  }
  if (options.seeds < 1) throw InvalidArgument("need at least one seed");
  const Problem problem = make_problem(base);
  RateResult result;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    RunConfig config = base;
    config.seed = base.seed + s;
    RunRecord record = run_coreset_mcmc(config, problem);
    if (!record.ok) throw NumericalError("rate run failed: " + record.error);
    bool clamped = false;
    result.slopes.push_back(
        loglog_slope(record.kl_trace, options.window_lo, options.window_hi, &clamped));
    result.clamped = result.clamped || clamped;
    result.final_kl.push_back(record.kl_trace.empty() ? 0.0
                                                      : record.kl_trace.back().second);
    if (records) records->push_back(std::move(record));
  }
  double total = 0.0;
  for (double s : result.slopes) total += s;
  result.mean_slope = total / static_cast<double>(result.slopes.size());
  result.median_final_kl = median(result.final_kl);
  return result;
}

namespace {

double run_group(const RunConfig& base, const Problem& problem,
                 const SweepOptions& options,
                 const std::filesystem::path& out_dir) {
  std::vector<double> finals;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    RunConfig config = base;
    config.seed = base.seed + s;
    const RunRecord record = run_coreset_mcmc(config, problem);
    if (options.write_runs) emit_outputs(record, out_dir);
    finals.push_back(record.ok ? record.final_metric
                               : std::numeric_limits<double>::infinity());
  }
  return median(std::move(finals));
}

}  // namespace

std::vector<SweepEntry> run_sweep(const RunConfig& base,
                                  const SweepOptions& options,
                                  const std::filesystem::path& out_dir) {
  const Problem problem = make_problem(base);
  std::vector<SweepEntry> entries;

  for (double lr : options.adam_grid) {
    RunConfig config = base;
    config.optimizer.kind = OptimizerKind::adam;
    config.optimizer.lr = lr;
    config.hot_start = options.gate_all ? std::optional<bool>(true) : std::nullopt;
    entries.push_back({OptimizerKind::adam, lr,
                       run_group(config, problem, options, out_dir), 0.0});
  }
  for (auto kind : options.free_methods) {
    for (double r : options.free_grid) {
      RunConfig config = base;
      config.optimizer.kind = kind;
      config.optimizer.r = r;
      config.hot_start = (options.gate_all || kind == OptimizerKind::hotdog)
                             ? std::optional<bool>(true)
                             : std::nullopt;
      entries.push_back({kind, r, run_group(config, problem, options, out_dir), 0.0});
    }
  }

  // Baseline: Hot DoG with r = 1e-3 and the hot-start gate.
  double baseline = 0.0;
  const auto it = std::find_if(entries.begin(), entries.end(), [](const SweepEntry& e) {
    return e.optimizer == OptimizerKind::hotdog && e.param == 1e-3;
  });
  if (it != entries.end()) {
    baseline = it->median_final_metric;
  } else {
    RunConfig config = base;
    config.optimizer.kind = OptimizerKind::hotdog;
    config.optimizer.r = 1e-3;
    config.hot_start = true;
    baseline = run_group(config, problem, options, out_dir);
  }
  for (auto& e : entries) e.ratio_to_hotdog = e.median_final_metric / baseline;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "sweep_summary.csv");
    if (!out) throw IoError("cannot write sweep summary");
    out << sweep_to_csv(entries);
  }
  return entries;
}

std::string sweep_to_csv(const std::vector<SweepEntry>& entries) {
  auto num = [](double v) {
    if (std::isnan(v)) return std::string("nan");
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  std::string out = "optimizer,param,median_final_avg_sq_z,ratio_to_hotdog\n";
  for (const auto& e : entries) {
    out += std::string(to_string(e.optimizer)) + "," + num(e.param) + "," +
           num(e.median_final_metric) + "," + num(e.ratio_to_hotdog) + "\n";
  }
  return out;
}

}  // namespace cmcmc

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmcmc/hotstart.hpp"
#include "cmcmc/kernels.hpp"
#include "cmcmc/metrics.hpp"
#include "cmcmc/models.hpp"
#include "cmcmc/optimizers.hpp"
#include "cmcmc/types.hpp"

namespace cmcmc {

/// Flat run configuration. Every field maps to one key of the key = value
/// config file and of the JSON sidecar (see config_keys()).
struct RunConfig {
  ModelSpec model;
  /// CSV path; empty means synthetic data.
  std::string dataset;
  std::string response_column = "y";
  SyntheticOptions synthetic;
  std::uint64_t data_seed = 1;

  std::size_t coreset_size = 20;
  std::size_t chains = 2;
  /// 0 means S = M.
  std::size_t subsample_size = 0;
  /// Class-balanced coreset selection; only meaningful for logreg.
  bool balance = true;

  OptimizerConfig optimizer;
  /// Gate optimization on the hot-start test. Unset: on for Hot DoG only.
  std::optional<bool> hot_start;
  HotStartConfig hot_start_config;

  std::size_t iters = 1000;
  std::uint64_t seed = 0;
  std::size_t metric_stride = 100;
  std::string out;
  double init_offset = 0.0;
  SliceConfig slice;

  /// JSON file with {"mu": [...], "sigma": [...]}; empty computes it.
  std::string reference_path;
  std::size_t reference_iters = 20000;
  bool record_wall_time = true;

  bool operator==(const RunConfig&) const = default;

  bool hot_start_enabled() const;
  std::size_t effective_subsample_size() const;
  /// Throws InvalidArgument on K < 2, T < 1, M < 1, stride < 1, ...
  void validate() const;
};

/// Applies one key = value setting. Throws InvalidArgument for unknown keys
/// or unparsable values.
void apply_setting(RunConfig& config, const std::string& key,
                   const std::string& value);

/// Parses a key = value file ('#' starts a comment).
RunConfig read_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, RunConfig base = {});

std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& json_text);

/// One recorded iteration.
struct RunRow {
  std::size_t iter = 0;
  double avg_sq_z = 0.0;
  double grad_norm = 0.0;
  /// Hot-start statistic; NaN once the test has passed or when disabled.
  double test_stat = 0.0;
  /// Whether the weights were optimized in this iteration.
  bool hot_started = false;
  double wall_ms = 0.0;
};

struct RunRecord {
  RunConfig config;
  std::vector<RunRow> rows;
  std::vector<std::size_t> coreset_indices;
  Weights initial_weights;
  Weights final_weights;
  /// First iteration in which the weights were optimized.
  std::optional<std::size_t> hot_start_iter;
  /// (iter, KL(π_w || π)) at each recorded row; Gaussian location only.
  std::vector<std::pair<std::size_t, double>> kl_trace;
  double final_metric = 0.0;
  std::size_t optimizer_steps = 0;
  std::size_t kernel_steps = 0;
  std::size_t gradient_loglik_evals = 0;
  bool ok = true;
  /// error_kind() of the abort cause; empty when ok.
  std::string error_kind;
  std::string error;
};

/// Dataset, model and reference shared by every run of one experiment.
struct Problem {
  std::shared_ptr<const Dataset> data;
  std::shared_ptr<const Model> model;
  ReferencePosterior reference;
};

Problem make_problem(const RunConfig& config);

std::string reference_to_json(const ReferencePosterior& ref);
ReferencePosterior reference_from_json(const std::string& json_text);

struct RunHooks {
  /// Called after the optimizer step of every iteration, before the chains
  /// move, with the weights used by the kernels in that iteration.
  std::function<void(std::size_t iter, const Weights& w, bool hot_started)>
      on_iteration;
};

/// Coreset MCMC with optional hot-start gating. Deterministic given
/// config.seed. Failures inside the loop are reported through ok/error with
/// the rows recorded so far.
RunRecord run_coreset_mcmc(const RunConfig& config);
RunRecord run_coreset_mcmc(const RunConfig& config, const Problem& problem,
                           const RunHooks& hooks = {});

/// Output file stem: <model>_<optimizer>_<param>_M<M>_seed<seed>.
std::string output_stem(const RunConfig& config);

std::string record_to_csv(const RunRecord& record);
std::string record_to_json(const RunRecord& record);

/// Writes <dir>/<stem>.csv and <dir>/<stem>.json. Returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> emit_outputs(
    const RunRecord& record, const std::filesystem::path& dir);

/// Output directory: `out` if set, else $CMCMC_OUTPUT_DIR, else "runs".
std::filesystem::path resolve_output_dir(const std::string& out);

// ---------------------------------------------------------------------------
// Convergence-rate experiment (Gaussian location).

struct RateOptions {
  std::size_t seeds = 10;
  double window_lo = 1e3;
  double window_hi = 1e4;
};

struct RateResult {
  double mean_slope = 0.0;
  std::vector<double> slopes;
  std::vector<double> final_kl;
  double median_final_kl = 0.0;
  /// True when some KL value was clamped at 1e-300.
  bool clamped = false;
};

/// Least-squares slope of log KL against log t over [lo, hi]. Values
/// below 1e-300 are clamped (and reported through `clamped`).
double loglog_slope(const std::vector<std::pair<std::size_t, double>>& trace,
                    double lo, double hi, bool* clamped = nullptr);

RateResult rate_experiment(const RunConfig& base, const RateOptions& options,
                           std::vector<RunRecord>* records = nullptr);

// ---------------------------------------------------------------------------
// Comparison sweep.

struct SweepOptions {
  std::size_t seeds = 10;
  std::vector<double> adam_grid{1e-3, 1e-2, 1e-1, 1e0, 1e1};
  std::vector<double> free_grid{1e-3, 1e-2, 1e-1, 1e0, 1e1};
  std::vector<OptimizerKind> free_methods{
      OptimizerKind::hotdog, OptimizerKind::dog, OptimizerKind::dowg,
      OptimizerKind::dadapt_sgd, OptimizerKind::prodigy_adam};
  /// Apply the hot-start gate to the comparison methods too.
  bool gate_all = false;
  bool write_runs = true;
};

struct SweepEntry {
  OptimizerKind optimizer;
  double param = 0.0;
  double median_final_metric = 0.0;
  /// median_final_metric / Hot DoG (r = 1e-3) median.
  double ratio_to_hotdog = 0.0;
};

double median(std::vector<double> values);

std::vector<SweepEntry> run_sweep(const RunConfig& base,
                                  const SweepOptions& options,
                                  const std::filesystem::path& out_dir);

std::string sweep_to_csv(const std::vector<SweepEntry>& entries);

}  // namespace cmcmc

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmcmc/dataset_io.hpp"
#include "cmcmc/errors.hpp"
#include "cmcmc/harness.hpp"

namespace {

int exit_code(std::string_view kind) {
  if (kind == "invalid_argument") return 2;
  if (kind == "io_error") return 3;
  if (kind == "unsupported_model") return 4;
  if (kind == "numerical_error") return 5;
  if (kind == "reference_failure" || kind == "invalid_reference") return 6;
  if (kind == "contract_violation") return 7;
  if (kind == "not_ready") return 8;
  return 1;
}

// Shared run flags. Flags override the config file; --set overrides both.
struct RunFlags {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<std::string> dataset;
  std::optional<std::size_t> coreset_size;
  std::optional<std::string> optimizer;
  std::optional<std::size_t> iters;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> metric_stride;
  std::vector<std::string> settings;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--model", model, "gaussian_location|sparse_linreg|linreg|logreg|poissonreg|bradley_terry");
    app->add_option("--dataset", dataset, "CSV dataset (default: synthetic)");
    app->add_option("--coreset-size", coreset_size, "coreset size M");
    app->add_option("--optimizer", optimizer, "adam|dog|dowg|dadapt_sgd|prodigy_adam|hotdog");
    app->add_option("--iters", iters, "iterations T");
    app->add_option("--seed", seed, "run seed");
    app->add_option("--out", out, "output directory");
    app->add_option("--metric-stride", metric_stride, "iterations between recorded rows");
    app->add_option("--set", settings, "extra key=value setting (repeatable)");
  }

  cmcmc::RunConfig build() const {
    cmcmc::RunConfig c;
    if (!config_path.empty()) c = cmcmc::read_config_file(config_path);
    auto set = [&c](const char* key, const std::string& value) {
      cmcmc::apply_setting(c, key, value);
    };
    if (model) set("model", *model);
    if (dataset) set("dataset", *dataset);
    if (coreset_size) set("coreset_size", std::to_string(*coreset_size));
    if (optimizer) set("optimizer", *optimizer);
    if (iters) set("iters", std::to_string(*iters));
    if (seed) set("seed", std::to_string(*seed));
    if (out) set("out", *out);
    if (metric_stride) set("metric_stride", std::to_string(*metric_stride));
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw cmcmc::InvalidArgument("--set expects key=value, got '" + s + "'");
      }
      set(s.substr(0, eq).c_str(), s.substr(eq + 1));
    }
    c.validate();
    return c;
  }
};

int cmd_run(const RunFlags& flags) {
  const auto config = flags.build();
  const auto record = cmcmc::run_coreset_mcmc(config);
  const auto [csv, sidecar] =
      cmcmc::emit_outputs(record, cmcmc::resolve_output_dir(config.out));
  std::cout << csv.string() << "\n" << sidecar.string() << "\n";
  if (!record.ok) {
    std::cerr << "run aborted (" << record.error_kind << "): " << record.error << "\n";
    return exit_code(record.error_kind);
  }
  std::cout << "final avg_sq_z " << record.final_metric << "\n";
  if (record.hot_start_iter) std::cout << "hot start at iter " << *record.hot_start_iter << "\n";
  return 0;
}

int cmd_sweep(const RunFlags& flags, cmcmc::SweepOptions options) {
  const auto config = flags.build();
  const auto dir = cmcmc::resolve_output_dir(config.out);
  const auto entries = cmcmc::run_sweep(config, options, dir);
  std::cout << cmcmc::sweep_to_csv(entries);
  return 0;
}

int cmd_rate(const RunFlags& flags, const cmcmc::RateOptions& options) {
  const auto config = flags.build();
  const auto result = cmcmc::rate_experiment(config, options);
  std::printf("mean_slope %.6g\nmedian_final_kl %.6g\n", result.mean_slope,
              result.median_final_kl);
  for (std::size_t i = 0; i < result.slopes.size(); ++i) {
    std::printf("seed %llu slope %.6g final_kl %.6g\n",
                static_cast<unsigned long long>(config.seed + i), result.slopes[i],
                result.final_kl[i]);
  }
  if (result.clamped) std::printf("warning: KL clamped at 1e-300\n");
  return 0;
}

int cmd_reference(const RunFlags& flags, const std::string& path) {
  auto config = flags.build();
  config.reference_path.clear();
  const auto problem = cmcmc::make_problem(config);
  const auto text = cmcmc::reference_to_json(problem.reference);
  if (path.empty()) {
    std::cout << text << "\n";
    return 0;
  }
  std::ofstream out(path);
  if (!out) throw cmcmc::IoError("cannot write " + path);
  out << text << "\n";
  return 0;
}

int cmd_generate(const RunFlags& flags, const std::string& path) {
  const auto config = flags.build();
  auto rng = cmcmc::make_stream(config.data_seed, 0);
  const auto data = cmcmc::generate_synthetic(config.model.kind, config.synthetic, rng);
  cmcmc::write_dataset_csv(data, path, config.response_column);
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coreset MCMC with learning-rate-free weight optimizers"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "one Coreset MCMC run; writes CSV and JSON sidecar");
  run_flags.attach(run);

  RunFlags sweep_flags;
  cmcmc::SweepOptions sweep_options;
  auto* sweep = app.add_subcommand("sweep", "ADAM grid vs learning-rate-free methods");
  sweep_flags.attach(sweep);
  sweep->add_option("--seeds", sweep_options.seeds, "seeds per grid point");
  sweep->add_flag("--gate-all", sweep_options.gate_all, "hot-start gate for every method");
  bool no_runs = false;
  sweep->add_flag("--summary-only", no_runs, "skip per-run CSV/JSON files");

  RunFlags rate_flags;
  cmcmc::RateOptions rate_options;
  auto* rate = app.add_subcommand("rate", "log-log KL slope (Gaussian location)");
  rate_flags.attach(rate);
  rate->add_option("--seeds", rate_options.seeds, "number of seeds");
  rate->add_option("--window-lo", rate_options.window_lo, "slope window start");
  rate->add_option("--window-hi", rate_options.window_hi, "slope window end");

  RunFlags ref_flags;
  std::string ref_path;
  auto* reference = app.add_subcommand("reference", "compute the full-data reference posterior");
  ref_flags.attach(reference);
  reference->add_option("--output", ref_path, "JSON output file (default: stdout)");

  RunFlags gen_flags;
  std::string gen_path;
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  gen_flags.attach(generate);
  generate->add_option("--output", gen_path, "CSV output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) {
      sweep_options.write_runs = !no_runs;
      return cmd_sweep(sweep_flags, sweep_options);
    }
    if (*rate) return cmd_rate(rate_flags, rate_options);
    if (*reference) return cmd_reference(ref_flags, ref_path);
    if (*generate) return cmd_generate(gen_flags, gen_path);
  } catch (const std::exception& e) {
    const auto kind = cmcmc::error_kind(e);
    std::cerr << "error (" << kind << "): " << e.what() << "\n";
    return exit_code(kind);
  }
  return 1;
}

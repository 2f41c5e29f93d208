#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmcmc/coreset.hpp"
#include "cmcmc/dataset_io.hpp"
#include "cmcmc/errors.hpp"
#include "cmcmc/gradient.hpp"
#include "cmcmc/harness.hpp"

namespace cmcmc {
namespace {

// Stream ids derived from the run seed.
constexpr std::uint64_t kCoresetStream = 1;
constexpr std::uint64_t kSubsampleStream = 2;
constexpr std::uint64_t kInitStream = 3;
constexpr std::uint64_t kChainStreamBase = 100;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Problem make_problem(const RunConfig& config) {
  Problem problem;
  const auto kind = config.model.kind;
  if (!config.dataset.empty()) {
    problem.data = std::make_shared<const Dataset>(read_dataset_csv(
        config.dataset, data_kind_for(kind), config.response_column));
  } else {
    Rng rng = make_stream(config.data_seed, 0);
    problem.data = std::make_shared<const Dataset>(
        generate_synthetic(kind, config.synthetic, rng));
  }
  problem.model = make_model(config.model, problem.data);

  if (kind == ModelKind::gaussian_location || config.reference_path.empty()) {
    ReferenceOptions options;
    options.iters = config.reference_iters;
    options.seed = config.data_seed;
    options.slice = config.slice;
    problem.reference = reference_posterior(*problem.model, options);
  } else {
    problem.reference = reference_from_json(slurp(config.reference_path));
  }
  if (static_cast<std::size_t>(problem.reference.mu.size()) !=
      problem.model->metric_dim()) {
    throw InvalidReference("reference dimension does not match the model");
  }
  return problem;
}

RunRecord run_coreset_mcmc(const RunConfig& config) {
  return run_coreset_mcmc(config, make_problem(config));
}

RunRecord run_coreset_mcmc(const RunConfig& config, const Problem& problem,
                           const RunHooks& hooks) {
  config.validate();
  const Model& model = *problem.model;
  const Dataset& data = *problem.data;
  const std::size_t N = data.size();
  const std::size_t M = config.coreset_size;
  const std::size_t S = config.effective_subsample_size();
  const std::size_t K = config.chains;
  if (M > N) throw InvalidArgument("coreset size exceeds the number of data");
  if (S > N) throw InvalidArgument("subsample size exceeds the number of data");
  problem.reference.validate();

  RunRecord record;
  record.config = config;

  Rng coreset_rng = make_stream(config.seed, kCoresetStream);
  const bool balance =
      config.balance && model.kind() == ModelKind::logreg;
  const CoresetSelection selection = select_coreset(data, M, balance, coreset_rng);
  record.coreset_indices = selection.indices;

  const Weights w0 = init_weights(N, M);
  Weights w = w0;
  record.initial_weights = w0;

  Optimizer optimizer(config.optimizer, w0);
  const auto kernel = make_kernel(model, selection, config.slice);

  Rng subsample_rng = make_stream(config.seed, kSubsampleStream);
  Rng init_rng = make_stream(config.seed, kInitStream);
  std::vector<Rng> chain_rngs;
  std::vector<Vector> initial;
  for (std::size_t k = 0; k < K; ++k) {
    chain_rngs.push_back(make_stream(config.seed, kChainStreamBase + k));
    initial.push_back(
        model.shift_state(model.sample_prior(init_rng), config.init_offset));
  }
  ChainEnsemble chains(std::move(initial));

  const bool gated = config.hot_start_enabled();
  bool h = !gated;
  if (h) {
    optimizer.mark_hot_started();
    record.hot_start_iter = 1;
  }

  StreamingMean stream(model.metric_dim());
  const bool track_kl = model.kind() == ModelKind::gaussian_location;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  const auto start = std::chrono::steady_clock::now();

  try {
    for (std::size_t t = 1; t <= config.iters; ++t) {
      const bool optimizing = h;
      double grad_norm = 0.0;
      if (optimizing) {
        const auto est =
            compute_gradient(model, w, selection, chains.states, S, subsample_rng);
        record.gradient_loglik_evals += (M + S) * K;
        grad_norm = est.g.norm();
        optimizer.step(w, est.g);
        if (!w.allFinite()) throw NumericalError("non-finite coreset weights");
      }
      if (hooks.on_iteration) hooks.on_iteration(t, w, optimizing);

      for (std::size_t k = 0; k < K; ++k) {
        kernel->step(chains.states[k], w, chain_rngs[k]);
        ++record.kernel_steps;
        if (!chains.states[k].allFinite()) {
          throw NumericalError("chain state became non-finite");
        }
        stream.push(model.metric_coords(chains.states[k]));
      }

      double test_stat = kNaN;
      if (!h) {
        std::vector<double> potentials(K);
        for (std::size_t k = 0; k < K; ++k) {
          potentials[k] = log_potential(w0, chains.states[k], model, selection);
        }
        chains.record(potentials);
        test_stat =
            hot_start_statistic(chains.potential_history, t, config.hot_start_config);
        if (test_stat < config.hot_start_config.threshold) {
          h = true;
          optimizer.mark_hot_started();
          record.hot_start_iter = t + 1;
        }
      }

      const bool last = t == config.iters;
      if (t % config.metric_stride == 0 || last) {
        const double metric = avg_sq_z(stream.second_half_mean(), problem.reference);
        if (last) record.final_metric = metric;
        if (t % config.metric_stride == 0) {
          RunRow row;
          row.iter = t;
          row.avg_sq_z = metric;
          row.grad_norm = grad_norm;
          row.test_stat = test_stat;
          row.hot_started = optimizing;
          if (config.record_wall_time) {
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
          }
          record.rows.push_back(row);
          if (track_kl) {
            record.kl_trace.emplace_back(t, gaussian_kl(w, selection, data));
          }
        }
      }
    }
  } catch (const Error& e) {
    record.ok = false;
    record.error_kind = error_kind(e);
    record.error = e.what();
  }

  // A hot-start iteration past the horizon means the weights never moved.
  if (record.hot_start_iter && *record.hot_start_iter > config.iters) {
    record.hot_start_iter.reset();
  }
  record.final_weights = w;
  record.optimizer_steps = optimizer.steps();
  return record;
}

}  // namespace cmcmc

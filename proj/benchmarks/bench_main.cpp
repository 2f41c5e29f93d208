#include <benchmark/benchmark.h>

#include "cmcmc/coreset.hpp"
#include "cmcmc/gradient.hpp"
#include "cmcmc/harness.hpp"
#include "cmcmc/hotstart.hpp"
#include "cmcmc/kernels.hpp"

using namespace cmcmc;

namespace {

std::shared_ptr<const Dataset> location_data(std::size_t n, std::size_t d) {
  Rng rng = make_stream(1, 0);
  SyntheticOptions opts;
  opts.n = n;
  opts.dim = d;
  return std::make_shared<const Dataset>(
      generate_synthetic(ModelKind::gaussian_location, opts, rng));
}

}  // namespace

// One estimator call: M + S rows, K = 2 chains.
void BM_ComputeGradient(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const auto data = location_data(10000, 10);
  GaussianLocationModel model(data);
  Rng rng = make_stream(2, 0);
  const auto sel = select_coreset(*data, M, false, rng);
  const Weights w = init_weights(data->size(), M);
  const std::vector<Vector> states{model.sample_prior(rng), model.sample_prior(rng)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_gradient(model, w, sel, states, M, rng).g);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * M * 2));
}
BENCHMARK(BM_ComputeGradient)->Arg(20)->Arg(100)->Arg(1000);

// Hot-start statistic over K = 2 traces of length t.
void BM_HotStartStatistic(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  Rng rng = make_stream(3, 0);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> h(2, std::vector<double>(t));
  for (auto& trace : h)
    for (auto& x : trace) x = normal(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hot_start_statistic(h, t, {}));
  }
}
BENCHMARK(BM_HotStartStatistic)->Arg(300)->Arg(3000)->Arg(30000);

// One slice step on the coreset posterior of the Gaussian location model.
void BM_SliceStep(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const auto data = location_data(1000, 10);
  GaussianLocationModel model(data);
  Rng rng = make_stream(4, 0);
  const auto sel = select_coreset(*data, M, false, rng);
  const Weights w = init_weights(data->size(), M);
  auto density = [&](const Vector& t) { return coreset_log_density(model, w, sel, t); };
  Vector theta = Vector::Zero(10);
  for (auto _ : state) {
    theta = slice_step(theta, density, {}, rng).theta;
    benchmark::DoNotOptimize(theta);
  }
}
BENCHMARK(BM_SliceStep)->Arg(20)->Arg(200);

// Full Coreset MCMC iterations on the desk instance (Hot DoG, exact kernel).
void BM_RunIterations(benchmark::State& state) {
  RunConfig c;
  c.synthetic.n = 1000;
  c.synthetic.dim = 2;
  c.coreset_size = 20;
  c.iters = static_cast<std::size_t>(state.range(0));
  c.metric_stride = 100;
  c.record_wall_time = false;
  const Problem problem = make_problem(c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_coreset_mcmc(c, problem).final_metric);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunIterations)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

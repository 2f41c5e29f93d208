#include "cmcmc/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmcmc/errors.hpp"

namespace cmcmc {

Matrix center_logliks(const Matrix& table) {
  if (table.cols() < 2) {
    throw InvalidArgument("centering needs K >= 2 chains");
  }
  return table.colwise() - table.rowwise().mean();
}

Vector estimate_gradient(const Weights& w, const Matrix& coreset_rows,
                         const Matrix& subsample_rows, std::size_t N) {
  const auto K = coreset_rows.cols();
  if (K < 2) throw InvalidArgument("gradient estimate needs K >= 2 chains");
  if (subsample_rows.cols() != K) {
    throw InvalidArgument("coreset and subsample blocks have different K");
  }
  if (w.size() != coreset_rows.rows()) {
    throw InvalidArgument("weights do not match the coreset block");
  }
  if (subsample_rows.rows() < 1) {
    throw InvalidArgument("subsample must be nonempty");
  }
  const double scale =
      static_cast<double>(N) / static_cast<double>(subsample_rows.rows());
  // Per-chain residual: weighted coreset sum minus scaled subsample sum.
  // Both sums run in row order so equal blocks cancel exactly.
  Vector residual(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double core = 0.0;
    for (Eigen::Index m = 0; m < coreset_rows.rows(); ++m) {
      core += w[m] * coreset_rows(m, k);
    }
    double sub = 0.0;
    for (Eigen::Index s = 0; s < subsample_rows.rows(); ++s) {
      sub += subsample_rows(s, k);
    }
    residual[k] = core - scale * sub;
  }
  return coreset_rows * residual / static_cast<double>(K - 1);
}

std::vector<std::size_t> draw_subsample(std::size_t N, std::size_t S, Rng& rng) {
  if (S < 1 || S > N) {
    throw InvalidArgument("subsample size must be in [1, N]");
  }
  // Floyd's algorithm would avoid the O(N) buffer; N is desk scale here.
  std::vector<std::size_t> pool(N);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < S; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, N - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(S);
  return pool;
}

GradientEstimate compute_gradient(const Model& model, const Weights& w,
                                  const CoresetSelection& selection,
                                  std::span<const Vector> states,
                                  std::vector<std::size_t> subsample) {
  const auto M = static_cast<Eigen::Index>(selection.size());
  const auto S = static_cast<Eigen::Index>(subsample.size());
  if (w.size() != M) throw InvalidArgument("weights do not match the coreset");

  // Both blocks are evaluated in ascending data-index order, so a coreset
  // equal to the subsample gives bit-identical sums.
  std::sort(subsample.begin(), subsample.end());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return selection.indices[static_cast<std::size_t>(a)] <
           selection.indices[static_cast<std::size_t>(b)];
  });

  std::vector<std::size_t> rows(selection.indices);
  rows.insert(rows.end(), subsample.begin(), subsample.end());

  GradientEstimate est;
  est.loglik_table = model.loglik_table(rows, states);
  if (est.loglik_table.hasNaN()) throw NumericalError("NaN log-likelihood");

  const Matrix centered = center_logliks(est.loglik_table);
  Matrix core(M, centered.cols());
  Weights w_sorted(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    core.row(i) = centered.row(order[static_cast<std::size_t>(i)]);
    w_sorted[i] = w[order[static_cast<std::size_t>(i)]];
  }
  const Vector g_sorted = estimate_gradient(w_sorted, core, centered.bottomRows(S),
                                            model.num_data());
  est.g.resize(M);
  for (Eigen::Index i = 0; i < M; ++i) est.g[order[static_cast<std::size_t>(i)]] = g_sorted[i];
  if (!est.g.allFinite()) {
    throw NumericalError("non-finite gradient estimate");
  }
  est.subsample = std::move(subsample);
  return est;
}

GradientEstimate compute_gradient(const Model& model, const Weights& w,
                                  const CoresetSelection& selection,
                                  std::span<const Vector> states, std::size_t S,
                                  Rng& rng) {
  return compute_gradient(model, w, selection, states,
                          draw_subsample(model.num_data(), S, rng));
}

Vector exact_kl_gradient(const Model& model, const Weights& w,
                         const CoresetSelection& selection) {
  if (model.kind() != ModelKind::gaussian_location) {
    throw UnsupportedModel("closed-form KL gradient needs Gaussian location");
  }
  const auto& X = model.data().features;
  const auto d = static_cast<double>(X.cols());
  const auto N = static_cast<double>(X.rows());

  Vector weighted_sum = Vector::Zero(X.cols());
  for (std::size_t m = 0; m < selection.size(); ++m) {
    weighted_sum +=
        w[static_cast<Eigen::Index>(m)] *
        X.row(static_cast<Eigen::Index>(selection.indices[m])).transpose();
  }
  const double total_w = w.sum();
  const double var = 1.0 / (1.0 + total_w);
  const Vector mean = weighted_sum * var;

  // ℓ_m = const + x_m'θ - |θ|²/2 and f = const + b'θ - B|θ|²/2; under
  // θ ~ N(mean, var I): Cov = var (x_m - mean)'(b - B mean) + B d var² / 2.
  const Vector b = weighted_sum - X.colwise().sum().transpose();
  const double B = total_w - N;
  const Vector direction = b - B * mean;

  Vector g(static_cast<Eigen::Index>(selection.size()));
  for (std::size_t m = 0; m < selection.size(); ++m) {
    const Vector x =
        X.row(static_cast<Eigen::Index>(selection.indices[m])).transpose();
    g[static_cast<Eigen::Index>(m)] =
        var * (x - mean).dot(direction) + 0.5 * B * d * var * var;
  }
  return g;
}

}  // namespace cmcmc

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmcmc/models.hpp"
#include "cmcmc/types.hpp"

namespace cmcmc {

struct GradientEstimate {
  Vector g;
  /// Subsample indices in ascending order.
  std::vector<std::size_t> subsample;
  /// (M + S) x K raw log-likelihoods: coreset rows first, then subsample rows.
  Matrix loglik_table;
};

/// Subtracts each row's mean over the K chains. Requires K >= 2.
Matrix center_logliks(const Matrix& table);

/// g_m = (K-1)^{-1} Σ_k ℓ̄_m(θ_k) (Σ_m' w_m' ℓ̄_m'(θ_k) - (N/S) Σ_s ℓ̄_s(θ_k)).
///
/// `coreset_rows` is M x K and `subsample_rows` is S x K; both must already
/// be centered.
Vector estimate_gradient(const Weights& w, const Matrix& coreset_rows,
                         const Matrix& subsample_rows, std::size_t N);

/// S distinct indices drawn uniformly from [0, N).
std::vector<std::size_t> draw_subsample(std::size_t N, std::size_t S, Rng& rng);

/// Full estimator pipeline for one iteration: subsample, evaluate the
/// (M + S) x K table, center it once, apply the estimator.
GradientEstimate compute_gradient(const Model& model, const Weights& w,
                                  const CoresetSelection& selection,
                                  std::span<const Vector> states, std::size_t S,
                                  Rng& rng);

/// Same as above with a caller-chosen subsample.
GradientEstimate compute_gradient(const Model& model, const Weights& w,
                                  const CoresetSelection& selection,
                                  std::span<const Vector> states,
                                  std::vector<std::size_t> subsample);

/// Closed-form Cov_{π_w}(ℓ_1..M(θ), Σ w_m ℓ_m(θ) - Σ_n ℓ_n(θ)) for the
/// Gaussian location model. Throws UnsupportedModel otherwise.
Vector exact_kl_gradient(const Model& model, const Weights& w,
                         const CoresetSelection& selection);

}  // namespace cmcmc

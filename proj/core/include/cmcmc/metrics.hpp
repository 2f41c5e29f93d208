#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "cmcmc/kernels.hpp"
#include "cmcmc/models.hpp"
#include "cmcmc/types.hpp"

namespace cmcmc {

struct ReferencePosterior {
  Vector mu;
  Vector sigma;

  void validate() const;
};

/// (1/D) Σ_i ((mu_i - mu_hat_i) / sigma_i)^2.
double avg_sq_z(const Vector& mu_hat, const ReferencePosterior& ref);

/// Running mean of the most recent ceil(T/2) of T pooled draws. Only that
/// window is buffered.
class StreamingMean {
 public:
  explicit StreamingMean(std::size_t dim);

  void push(const Vector& draw);
  std::size_t count() const { return count_; }
  std::size_t dim() const { return static_cast<std::size_t>(sum_.size()); }

  /// Throws NotReady with fewer than two draws.
  Vector second_half_mean() const;

 private:
  std::size_t count_ = 0;
  std::deque<Vector> window_;
  Vector sum_;
};

/// Moments of the Gaussian-location coreset posterior: mean and the common
/// coordinate variance.
struct IsotropicGaussian {
  Vector mean;
  double var = 1.0;
};

IsotropicGaussian gaussian_coreset_posterior(const Weights& w,
                                             const CoresetSelection& selection,
                                             const Dataset& data);

IsotropicGaussian gaussian_full_posterior(const Dataset& data);

double kl_isotropic(const IsotropicGaussian& p, const IsotropicGaussian& q);

/// KL(π_w || π) for the Gaussian location model.
double gaussian_kl(const Weights& w, const CoresetSelection& selection,
                   const Dataset& data);

struct ReferenceOptions {
  std::size_t iters = 20000;
  std::uint64_t seed = 12345;
  SliceConfig slice;
};

/// Full-data posterior means and sds of the metric coordinates. Closed
/// form for Gaussian location; otherwise a long full-data chain (slice or
/// Gibbs) with the first half discarded. Throws ReferenceFailure if the
/// chain produces a non-finite state.
ReferencePosterior reference_posterior(const Model& model,
                                       const ReferenceOptions& options = {});

}  // namespace cmcmc

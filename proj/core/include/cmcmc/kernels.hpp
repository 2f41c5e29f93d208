#pragma once

#include <functional>
#include <memory>

#include "cmcmc/models.hpp"
#include "cmcmc/types.hpp"

namespace cmcmc {

struct SliceConfig {
  double initial_width = 1.0;
  int max_doublings = 30;

  bool operator==(const SliceConfig&) const = default;
};

using LogDensity = std::function<double(const Vector&)>;

struct SliceStep {
  Vector theta;
  /// Slice level y drawn for this step.
  double level = 0.0;
  /// log_density(theta) at the returned point; always >= level.
  double log_density = 0.0;
};

/// Hit-and-run slice update: uniform direction on the sphere, doubling
/// bracket, shrinkage with the doubling acceptability check.
SliceStep slice_step(const Vector& theta, const LogDensity& log_density,
                     const SliceConfig& config, Rng& rng);

/// Exact draw from the Gaussian-location coreset posterior
/// N(Σ w x / (1 + Σ w), (1 + Σ w)^{-1} I).
Vector gaussian_exact_step(const Weights& w, const CoresetSelection& selection,
                           const Dataset& data, Rng& rng);

/// One Gibbs sweep (beta, sigma^2, gamma) for the spike-and-slab model under
/// the weighted likelihood Π_m N(y_m; x_m'beta, sigma^2)^{w_m}.
SparseState ssvs_gibbs_step(const SparseState& state, const Weights& w,
                            const CoresetSelection& selection,
                            const Dataset& data, const SparseHyper& hyper,
                            Rng& rng);

/// Σ_m w_m ℓ_m(theta) + log prior(theta).
double coreset_log_density(const Model& model, const Weights& w,
                           const CoresetSelection& selection,
                           const Vector& theta);

/// π_w-invariant transition used by the run loop.
class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual void step(Vector& theta, const Weights& w, Rng& rng) const = 0;
};

/// Exact sampler for Gaussian location, SSVS Gibbs for sparse regression,
/// slice sampling otherwise.
std::unique_ptr<Kernel> make_kernel(const Model& model,
                                    const CoresetSelection& selection,
                                    const SliceConfig& slice = {});

}  // namespace cmcmc

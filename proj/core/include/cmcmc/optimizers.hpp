#pragma once

#include <cstddef>
#include <string_view>
#include <variant>

#include "cmcmc/types.hpp"

namespace cmcmc {

/// Coordinate-wise max(w, 0); also maps -0.0 to +0.0.
Weights project_nonneg(Weights w);

// ---------------------------------------------------------------------------
// ADAM

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamParams params;
  Vector m;
  Vector v;
  std::size_t t = 0;

  static AdamState init(std::size_t M, AdamParams params);
};

void adam_step(AdamState& state, Weights& w, const Vector& g);

// ---------------------------------------------------------------------------
// DoG / DoWG: SGD with a scalar step r_t / sqrt(G_t) (DoG) or
// r_t^2 / sqrt(Σ r_i^2 |g_i|^2) (DoWG), r_t = max(r_eps, max_i |w_i - w_0|).

enum class DistanceWeighting { dog, dowg };

struct DogState {
  DistanceWeighting weighting = DistanceWeighting::dog;
  double r_eps = 1e-3;
  double max_dist = 1e-3;
  double grad_sq_sum = 0.0;
  Weights w0;
  /// Step size used by the most recent step (0 when skipped).
  double last_lr = 0.0;

  static DogState init(const Weights& w0, double r_eps,
                       DistanceWeighting weighting = DistanceWeighting::dog);
};

void dog_step(DogState& state, Weights& w, const Vector& g);
void dowg_step(DogState& state, Weights& w, const Vector& g);

// ---------------------------------------------------------------------------
// D-Adaptation SGD and prodigy ADAM share the lower bound
//   d_{t+1} = max(Σ_i d_i <g_i, w_0 - w_i> / |Σ_i d_i g_i|, d_t).

struct DAdaptState {
  double d = 1e-6;
  double numerator_sum = 0.0;
  Vector grad_accum;
  double grad_sq_sum = 0.0;
  Weights w0;
  double last_lr = 0.0;

  static DAdaptState init(const Weights& w0, double d0);
};

/// Applies the d-bound update with the current gradient and iterate.
void update_lower_bound(DAdaptState& state, const Weights& w, const Vector& g);

/// SGD with step d_t / sqrt(Σ |g_i|^2).
void dadapt_sgd_step(DAdaptState& state, Weights& w, const Vector& g);

struct ProdigyState {
  DAdaptState bound;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Vector m;
  Vector v;
  std::size_t t = 0;

  static ProdigyState init(const Weights& w0, double d0);
};

/// ADAM on d-scaled moments (m tracks d_t g, v tracks d_t^2 g^2) with
/// bias correction and step d_t m_hat / (sqrt(v_hat) + d_t eps).
void prodigy_adam_step(ProdigyState& state, Weights& w, const Vector& g);

// ---------------------------------------------------------------------------
// Hot DoG

struct HotDogParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double r = 1e-3;
};

struct HotDogState {
  HotDogParams params;
  Vector m;
  Vector v;
  Vector d;
  Weights w0;
  std::size_t c = 0;
  bool h = false;

  static HotDogState init(const Weights& w0, HotDogParams params);
};

/// One coordinate-wise Hot DoG update. Requires state.h; increments c.
void hotdog_step(HotDogState& state, Weights& w, const Vector& g);

// ---------------------------------------------------------------------------
// Uniform front end used by the run loop.

enum class OptimizerKind { adam, dog, dowg, dadapt_sgd, prodigy_adam, hotdog };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::hotdog;
  /// ADAM learning rate.
  double lr = 1e-3;
  /// r for Hot DoG, r_eps for DoG/DoWG, d_0 for D-Adaptation/prodigy.
  double r = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const OptimizerConfig&) const = default;
};

class Optimizer {
 public:
  using State = std::variant<AdamState, DogState, DAdaptState, ProdigyState,
                             HotDogState>;

  Optimizer(const OptimizerConfig& config, const Weights& w0);

  /// Updates w in place and projects onto w >= 0.
  void step(Weights& w, const Vector& g);

  /// Sets Hot DoG's hot-start flag; no effect for the other methods.
  void mark_hot_started();

  OptimizerKind kind() const { return kind_; }
  std::size_t steps() const { return steps_; }
  const State& state() const { return state_; }

 private:
  OptimizerKind kind_;
  State state_;
  std::size_t steps_ = 0;
};

}  // namespace cmcmc

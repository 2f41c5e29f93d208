#include "cmcmc/optimizers.hpp"

#include <cmath>
#include <string>

#include "cmcmc/errors.hpp"

namespace cmcmc {
namespace {

void require_finite(const Vector& g) {
  if (!g.allFinite()) throw NumericalError("non-finite gradient estimate");
}

void require_size(const Weights& w, const Vector& g, Eigen::Index expected) {
  if (w.size() != expected || g.size() != expected) {
    throw InvalidArgument("optimizer dimension mismatch");
  }
}

}  // namespace

Weights project_nonneg(Weights w) {
  // max(-0.0, 0.0) may return -0.0; compare explicitly.
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) w[i] = 0.0;
  }
  return w;
}

// ADAM --------------------------------------------------------------------------

AdamState AdamState::init(std::size_t M, AdamParams params) {
  const auto n = static_cast<Eigen::Index>(M);
  return AdamState{params, Vector::Zero(n), Vector::Zero(n), 0};
}

void adam_step(AdamState& state, Weights& w, const Vector& g) {
  require_finite(g);
  require_size(w, g, state.m.size());
  const auto& p = state.params;
  ++state.t;
  const double t = static_cast<double>(state.t);
  state.m = p.beta1 * state.m + (1.0 - p.beta1) * g;
  state.v = p.beta2 * state.v + (1.0 - p.beta2) * g.cwiseAbs2();
  const Vector m_hat = state.m / (1.0 - std::pow(p.beta1, t));
  const Vector v_hat = state.v / (1.0 - std::pow(p.beta2, t));
  w = project_nonneg(
      w - p.lr * (m_hat.array() / (v_hat.array().sqrt() + p.eps)).matrix());
}

// DoG / DoWG --------------------------------------------------------------------

DogState DogState::init(const Weights& w0, double r_eps,
                        DistanceWeighting weighting) {
  if (!(r_eps > 0.0)) throw InvalidArgument("r_eps must be positive");
  DogState s;
  s.weighting = weighting;
  s.r_eps = r_eps;
  s.max_dist = r_eps;
  s.w0 = w0;
  return s;
}

namespace {

void distance_step(DogState& state, Weights& w, const Vector& g) {
  require_finite(g);
  require_size(w, g, state.w0.size());
  state.max_dist = std::max(state.max_dist, (w - state.w0).norm());
  const double r = state.max_dist;
  const double g_sq = g.squaredNorm();
  state.grad_sq_sum +=
      state.weighting == DistanceWeighting::dog ? g_sq : r * r * g_sq;
  if (state.grad_sq_sum == 0.0) {
    state.last_lr = 0.0;
    return;
  }
  const double root = std::sqrt(state.grad_sq_sum);
  state.last_lr =
      state.weighting == DistanceWeighting::dog ? r / root : r * r / root;
  w = project_nonneg(w - state.last_lr * g);
}

}  // namespace

void dog_step(DogState& state, Weights& w, const Vector& g) {
  if (state.weighting != DistanceWeighting::dog) {
    throw ContractViolation("dog_step called on a DoWG state");
  }
  distance_step(state, w, g);
}

void dowg_step(DogState& state, Weights& w, const Vector& g) {
  if (state.weighting != DistanceWeighting::dowg) {
    throw ContractViolation("dowg_step called on a DoG state");
  }
  distance_step(state, w, g);
}

// D-Adaptation / prodigy --------------------------------------------------------

DAdaptState DAdaptState::init(const Weights& w0, double d0) {
  if (!(d0 > 0.0)) throw InvalidArgument("d0 must be positive");
  DAdaptState s;
  s.d = d0;
  s.grad_accum = Vector::Zero(w0.size());
  s.w0 = w0;
  return s;
}

void update_lower_bound(DAdaptState& state, const Weights& w, const Vector& g) {
  state.numerator_sum += state.d * g.dot(state.w0 - w);
  state.grad_accum += state.d * g;
  const double denom = state.grad_accum.norm();
  if (denom > 0.0) {
    state.d = std::max(state.numerator_sum / denom, state.d);
  }
}

void dadapt_sgd_step(DAdaptState& state, Weights& w, const Vector& g) {
  require_finite(g);
  require_size(w, g, state.w0.size());
  state.grad_sq_sum += g.squaredNorm();
  Weights next = w;
  if (state.grad_sq_sum > 0.0) {
    state.last_lr = state.d / std::sqrt(state.grad_sq_sum);
    next = project_nonneg(w - state.last_lr * g);
  } else {
    state.last_lr = 0.0;
  }
  update_lower_bound(state, w, g);
  w = std::move(next);
}

ProdigyState ProdigyState::init(const Weights& w0, double d0) {
  ProdigyState s;
  s.bound = DAdaptState::init(w0, d0);
  s.m = Vector::Zero(w0.size());
  s.v = Vector::Zero(w0.size());
  return s;
}

void prodigy_adam_step(ProdigyState& state, Weights& w, const Vector& g) {
  require_finite(g);
  require_size(w, g, state.m.size());
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double d = state.bound.d;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * d * g;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * d * d * g.cwiseAbs2();
  const Vector m_hat = state.m / (1.0 - std::pow(state.beta1, t));
  const Vector v_hat = state.v / (1.0 - std::pow(state.beta2, t));
  Weights next = project_nonneg(
      w - d * (m_hat.array() / (v_hat.array().sqrt() + d * state.eps)).matrix());
  state.bound.grad_sq_sum += g.squaredNorm();
  update_lower_bound(state.bound, w, g);
  w = std::move(next);
}

// Hot DoG -----------------------------------------------------------------------

HotDogState HotDogState::init(const Weights& w0, HotDogParams params) {
  if (!(params.r > 0.0)) throw InvalidArgument("r must be positive");
  HotDogState s;
  s.params = params;
  s.m = Vector::Zero(w0.size());
  s.v = Vector::Zero(w0.size());
  s.d = Vector::Zero(w0.size());
  s.w0 = w0;
  return s;
}

void hotdog_step(HotDogState& state, Weights& w, const Vector& g) {
  if (!state.h) {
    throw ContractViolation("hotdog_step called before the hot-start test passed");
  }
  require_finite(g);
  require_size(w, g, state.w0.size());
  const auto& p = state.params;
  ++state.c;
  const double c = static_cast<double>(state.c);

  state.v = p.beta2 * state.v + (1.0 - p.beta2) * g.cwiseAbs2();
  state.m = p.beta1 * state.m + (1.0 - p.beta1) * g;
  state.d = p.beta1 * state.d +
            (1.0 - p.beta1) * (w - state.w0).cwiseAbs().cwiseMax(state.d);

  const Vector v_hat = state.v / (1.0 - std::pow(p.beta2, c));
  const Vector m_hat = state.m / (1.0 - std::pow(p.beta1, c));
  const Vector d_hat =
      state.c == 1 ? Vector::Constant(w.size(), p.r)
                   : Vector(state.d / (1.0 - std::pow(p.beta1, c - 1.0)));

  const Vector step = d_hat.array() * m_hat.array() /
                      (c * (v_hat.array() + p.eps)).sqrt();
  w = project_nonneg(w - step);
}

// Front end ---------------------------------------------------------------------

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::adam:
      return "adam";
    case OptimizerKind::dog:
      return "dog";
    case OptimizerKind::dowg:
      return "dowg";
    case OptimizerKind::dadapt_sgd:
      return "dadapt_sgd";
    case OptimizerKind::prodigy_adam:
      return "prodigy_adam";
    case OptimizerKind::hotdog:
      return "hotdog";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  for (auto kind : {OptimizerKind::adam, OptimizerKind::dog, OptimizerKind::dowg,
                    OptimizerKind::dadapt_sgd, OptimizerKind::prodigy_adam,
                    OptimizerKind::hotdog}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown optimizer: " + std::string(name));
}

namespace {

Optimizer::State make_state(const OptimizerConfig& config, const Weights& w0) {
  switch (config.kind) {
    case OptimizerKind::adam:
      return AdamState::init(static_cast<std::size_t>(w0.size()),
                             {config.lr, config.beta1, config.beta2, config.eps});
    case OptimizerKind::dog:
      return DogState::init(w0, config.r, DistanceWeighting::dog);
    case OptimizerKind::dowg:
      return DogState::init(w0, config.r, DistanceWeighting::dowg);
    case OptimizerKind::dadapt_sgd:
      return DAdaptState::init(w0, config.r);
    case OptimizerKind::prodigy_adam: {
      auto s = ProdigyState::init(w0, config.r);
      s.beta1 = config.beta1;
      s.beta2 = config.beta2;
      s.eps = config.eps;
      return s;
    }
    case OptimizerKind::hotdog:
      return HotDogState::init(
          w0, {config.beta1, config.beta2, config.eps, config.r});
  }
  throw InvalidArgument("unknown optimizer kind");
}

}  // namespace

Optimizer::Optimizer(const OptimizerConfig& config, const Weights& w0)
    : kind_(config.kind), state_(make_state(config, w0)) {}

void Optimizer::mark_hot_started() {
  if (auto* s = std::get_if<HotDogState>(&state_)) s->h = true;
}

void Optimizer::step(Weights& w, const Vector& g) {
  switch (kind_) {
    case OptimizerKind::adam:
      adam_step(std::get<AdamState>(state_), w, g);
      break;
    case OptimizerKind::dog:
      dog_step(std::get<DogState>(state_), w, g);
      break;
    case OptimizerKind::dowg:
      dowg_step(std::get<DogState>(state_), w, g);
      break;
    case OptimizerKind::dadapt_sgd:
      dadapt_sgd_step(std::get<DAdaptState>(state_), w, g);
      break;
    case OptimizerKind::prodigy_adam:
      prodigy_adam_step(std::get<ProdigyState>(state_), w, g);
      break;
    case OptimizerKind::hotdog:
      hotdog_step(std::get<HotDogState>(state_), w, g);
      break;
  }
  ++steps_;
}

}  // namespace cmcmc

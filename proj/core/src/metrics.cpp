#include "cmcmc/metrics.hpp"

#include <cmath>
#include <numeric>

#include "cmcmc/errors.hpp"

namespace cmcmc {

void ReferencePosterior::validate() const {
  if (mu.size() != sigma.size() || mu.size() == 0) {
    throw InvalidReference("reference mean and sd sizes differ");
  }
  if (!mu.allFinite() || !sigma.allFinite()) {
    throw InvalidReference("non-finite reference moments");
  }
  if ((sigma.array() <= 0.0).any()) {
    throw InvalidReference("reference sd must be positive");
  }
}

double avg_sq_z(const Vector& mu_hat, const ReferencePosterior& ref) {
  if (mu_hat.size() != ref.mu.size() || ref.mu.size() != ref.sigma.size()) {
    throw InvalidArgument("metric dimension mismatch");
  }
  if ((ref.sigma.array() == 0.0).any()) {
    throw InvalidReference("zero reference sd");
  }
  return ((ref.mu - mu_hat).array() / ref.sigma.array()).square().mean();
}

StreamingMean::StreamingMean(std::size_t dim)
    : sum_(Vector::Zero(static_cast<Eigen::Index>(dim))) {}

void StreamingMean::push(const Vector& draw) {
  if (draw.size() != sum_.size()) {
    throw InvalidArgument("draw dimension mismatch");
  }
  window_.push_back(draw);
  sum_ += draw;
  ++count_;
  const std::size_t keep = (count_ + 1) / 2;
  bool popped = false;
  while (window_.size() > keep) {
    sum_ -= window_.front();
    window_.pop_front();
    popped = true;
  }
  // Re-sum periodically so subtraction error does not accumulate.
  if (popped && (count_ & (count_ - 1)) == 0) {
    sum_.setZero();
    for (const auto& v : window_) sum_ += v;
  }
}

Vector StreamingMean::second_half_mean() const {
  if (count_ < 2) throw NotReady("second-half mean needs at least two draws");
  return sum_ / static_cast<double>(window_.size());
}

IsotropicGaussian gaussian_coreset_posterior(const Weights& w,
                                             const CoresetSelection& selection,
                                             const Dataset& data) {
  if (static_cast<std::size_t>(w.size()) != selection.size()) {
    throw InvalidArgument("weight and coreset sizes differ");
  }
  Vector weighted_sum = Vector::Zero(data.features.cols());
  for (std::size_t m = 0; m < selection.size(); ++m) {
    weighted_sum +=
        w[static_cast<Eigen::Index>(m)] *
        data.features.row(static_cast<Eigen::Index>(selection.indices[m]))
            .transpose();
  }
  const double var = 1.0 / (1.0 + w.sum());
  return {weighted_sum * var, var};
}

IsotropicGaussian gaussian_full_posterior(const Dataset& data) {
  const double var = 1.0 / (1.0 + static_cast<double>(data.features.rows()));
  return {data.features.colwise().sum().transpose() * var, var};
}

double kl_isotropic(const IsotropicGaussian& p, const IsotropicGaussian& q) {
  const auto d = static_cast<double>(p.mean.size());
  const double ratio = p.var / q.var;
  return 0.5 * (d * ratio + (q.mean - p.mean).squaredNorm() / q.var - d -
                d * std::log(ratio));
}

double gaussian_kl(const Weights& w, const CoresetSelection& selection,
                   const Dataset& data) {
  if (data.kind != DataKind::location) {
    throw UnsupportedModel("closed-form KL needs the Gaussian location model");
  }
  return kl_isotropic(gaussian_coreset_posterior(w, selection, data),
                      gaussian_full_posterior(data));
}

ReferencePosterior reference_posterior(const Model& model,
                                       const ReferenceOptions& options) {
  if (model.kind() == ModelKind::gaussian_location) {
    const auto post = gaussian_full_posterior(model.data());
    return {post.mean, Vector::Constant(post.mean.size(), std::sqrt(post.var))};
  }
  if (options.iters < 4) {
    throw InvalidArgument("reference run needs at least 4 iterations");
  }

  CoresetSelection all;
  all.indices.resize(model.num_data());
  std::iota(all.indices.begin(), all.indices.end(), std::size_t{0});
  const Weights ones = Weights::Ones(static_cast<Eigen::Index>(all.size()));
  const auto kernel = make_kernel(model, all, options.slice);

  Rng rng = make_stream(options.seed, 0x5eed);
  Vector theta = model.sample_prior(rng);
  const auto D = static_cast<Eigen::Index>(model.metric_dim());
  // Welford accumulation over the second half of the chain.
  Vector mean = Vector::Zero(D);
  Vector m2 = Vector::Zero(D);
  double n = 0.0;
  const std::size_t burn = options.iters / 2;
  for (std::size_t i = 0; i < options.iters; ++i) {
    kernel->step(theta, ones, rng);
    if (!theta.allFinite()) {
      throw ReferenceFailure("reference chain left the finite domain");
    }
    if (i < burn) continue;
    const Vector x = model.metric_coords(theta);
    n += 1.0;
    const Vector delta = x - mean;
    mean += delta / n;
    m2 += delta.cwiseProduct(x - mean);
  }
  ReferencePosterior ref;
  ref.mu = mean;
  ref.sigma = (m2 / (n - 1.0)).cwiseSqrt();
  if (!ref.mu.allFinite() || (ref.sigma.array() <= 0.0).any()) {
    throw ReferenceFailure("degenerate reference posterior");
  }
  return ref;
}

}  // namespace cmcmc

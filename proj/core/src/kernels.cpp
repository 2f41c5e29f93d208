#include "cmcmc/kernels.hpp"

#include <cmath>
#include <limits>

#include "cmcmc/errors.hpp"

namespace cmcmc {
namespace {

constexpr int kMaxShrinks = 1000;

Vector random_direction(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector u(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal(rng);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

double log_normal_density(double x, double sd) {
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  const double z = x / sd;
  return -kHalfLog2Pi - std::log(sd) - 0.5 * z * z;
}

}  // namespace

SliceStep slice_step(const Vector& theta, const LogDensity& log_density,
                     const SliceConfig& config, Rng& rng) {
  if (!(config.initial_width > 0.0) || config.max_doublings < 1) {
    throw InvalidArgument("invalid slice sampler configuration");
  }
  const double f0 = log_density(theta);
  if (!std::isfinite(f0)) {
    throw ContractViolation("slice sampler started from an invalid state");
  }

  const Vector u = random_direction(static_cast<std::size_t>(theta.size()), rng);
  auto f = [&](double s) {
    const double v = log_density(theta + s * u);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  std::uniform_real_distribution<double> unif;
  std::exponential_distribution<double> expo(1.0);
  const double level = f0 - expo(rng);
  const double width = config.initial_width;

  // Doubling: grow a randomly placed bracket until both ends leave the slice.
  double left = -width * unif(rng);
  double right = left + width;
  double f_left = f(left);
  double f_right = f(right);
  for (int k = config.max_doublings; k > 0 && (f_left >= level || f_right >= level);
       --k) {
    if (unif(rng) < 0.5) {
      left -= right - left;
      f_left = f(left);
    } else {
      right += right - left;
      f_right = f(right);
    }
  }

  // The doubling acceptability test: s must be reachable from its own
  // bracket by the same doubling sequence.
  auto acceptable = [&](double s) {
    double lo = left;
    double hi = right;
    double f_lo = f_left;
    double f_hi = f_right;
    bool differ = false;
    while (hi - lo > 1.1 * width) {
      const double mid = 0.5 * (lo + hi);
      if ((0.0 < mid && s >= mid) || (0.0 >= mid && s < mid)) differ = true;
      if (s < mid) {
        hi = mid;
        f_hi = f(mid);
      } else {
        lo = mid;
        f_lo = f(mid);
      }
      if (differ && f_lo < level && f_hi < level) return false;
    }
    return true;
  };

  double lo = left;
  double hi = right;
  for (int i = 0; i < kMaxShrinks; ++i) {
    const double s = lo + unif(rng) * (hi - lo);
    const double fs = f(s);
    if (fs >= level && acceptable(s)) {
      return {theta + s * u, level, fs};
    }
    if (s < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
  }
  // Bracket collapsed onto the current point.
  return {theta, level, f0};
}

Vector gaussian_exact_step(const Weights& w, const CoresetSelection& selection,
                           const Dataset& data, Rng& rng) {
  if (static_cast<std::size_t>(w.size()) != selection.size()) {
    throw InvalidArgument("weight and coreset sizes differ");
  }
  if ((w.array() < 0.0).any()) {
    throw ContractViolation("negative coreset weight");
  }
  const auto d = data.features.cols();
  Vector weighted_sum = Vector::Zero(d);
  for (std::size_t m = 0; m < selection.size(); ++m) {
    weighted_sum +=
        w[static_cast<Eigen::Index>(m)] *
        data.features.row(static_cast<Eigen::Index>(selection.indices[m]))
            .transpose();
  }
  const double precision = 1.0 + w.sum();
  const double sd = 1.0 / std::sqrt(precision);
  std::normal_distribution<double> normal;
  Vector out(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out[i] = weighted_sum[i] / precision + sd * normal(rng);
  }
  return out;
}

SparseState ssvs_gibbs_step(const SparseState& state, const Weights& w,
                            const CoresetSelection& selection,
                            const Dataset& data, const SparseHyper& hyper,
                            Rng& rng) {
  const auto p = data.features.cols();
  if (state.beta.size() != p || state.gamma.size() != p) {
    throw InvalidArgument("sparse state does not match the data width");
  }
  if (static_cast<std::size_t>(w.size()) != selection.size()) {
    throw InvalidArgument("weight and coreset sizes differ");
  }
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;

  // Weighted sufficient statistics X'WX, X'Wy.
  Matrix xtx = Matrix::Zero(p, p);
  Vector xty = Vector::Zero(p);
  double total_w = 0.0;
  for (std::size_t m = 0; m < selection.size(); ++m) {
    const double wm = w[static_cast<Eigen::Index>(m)];
    if (wm == 0.0) continue;
    const auto row = static_cast<Eigen::Index>(selection.indices[m]);
    const Vector x = data.features.row(row).transpose();
    xtx.noalias() += wm * x * x.transpose();
    xty += wm * data.responses[row] * x;
    total_w += wm;
  }

  SparseState next = state;

  // beta | gamma, sigma^2 ~ N(A^{-1} X'Wy / sigma^2, A^{-1}).
  Vector prior_prec(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double sd = state.gamma[i] ? hyper.c * hyper.tau : hyper.tau;
    prior_prec[i] = 1.0 / (sd * sd);
  }
  Matrix A = xtx / state.sigma2;
  A.diagonal() += prior_prec;
  const Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("beta conditional precision is not positive definite");
  }
  const Vector mean = llt.solve(xty / state.sigma2);
  Vector z(p);
  for (Eigen::Index i = 0; i < p; ++i) z[i] = normal(rng);
  next.beta = mean + llt.matrixU().solve(z);

  // sigma^2 | beta ~ InvGamma((nu + Σw)/2, (nu lambda + Σ w (y - x'beta)^2)/2).
  double sse = 0.0;
  for (std::size_t m = 0; m < selection.size(); ++m) {
    const double wm = w[static_cast<Eigen::Index>(m)];
    if (wm == 0.0) continue;
    const auto row = static_cast<Eigen::Index>(selection.indices[m]);
    const double r = data.responses[row] - data.features.row(row).dot(next.beta);
    sse += wm * r * r;
  }
  const double shape = 0.5 * (hyper.nu + total_w);
  const double rate = 0.5 * (hyper.nu * hyper.lambda + sse);
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  double g = 0.0;
  do {
    g = gamma(rng);
  } while (!(g > 0.0) || !std::isfinite(1.0 / g));
  next.sigma2 = 1.0 / g;

  // gamma_i | beta_i: log odds of inclusion.
  const double prior_log_odds =
      hyper.q >= 1.0 ? std::numeric_limits<double>::infinity()
      : hyper.q <= 0.0
          ? -std::numeric_limits<double>::infinity()
          : std::log(hyper.q) - std::log1p(-hyper.q);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double log_odds =
        prior_log_odds + log_normal_density(next.beta[i], hyper.c * hyper.tau) -
        log_normal_density(next.beta[i], hyper.tau);
    const double prob = log_odds >= 0.0 ? 1.0 / (1.0 + std::exp(-log_odds))
                                        : std::exp(log_odds) /
                                              (1.0 + std::exp(log_odds));
    next.gamma[i] = unif(rng) < prob ? 1 : 0;
  }
  return next;
}

double coreset_log_density(const Model& model, const Weights& w,
                           const CoresetSelection& selection,
                           const Vector& theta) {
  const double prior = model.logprior(theta);
  if (prior == -std::numeric_limits<double>::infinity()) return prior;
  double total = prior;
  for (std::size_t m = 0; m < selection.size(); ++m) {
    const double wm = w[static_cast<Eigen::Index>(m)];
    if (wm == 0.0) continue;
    total += wm * model.loglik(selection.indices[m], theta);
  }
  if (std::isnan(total)) throw NumericalError("NaN log density");
  return total;
}

namespace {

class ExactGaussianKernel final : public Kernel {
 public:
  ExactGaussianKernel(const Model& model, const CoresetSelection& selection)
      : model_(model), selection_(selection) {}

  void step(Vector& theta, const Weights& w, Rng& rng) const override {
    theta = gaussian_exact_step(w, selection_, model_.data(), rng);
  }

 private:
  const Model& model_;
  const CoresetSelection& selection_;
};

class SsvsKernel final : public Kernel {
 public:
  SsvsKernel(const SparseRegressionModel& model,
             const CoresetSelection& selection)
      : model_(model), selection_(selection) {}

  void step(Vector& theta, const Weights& w, Rng& rng) const override {
    const auto next = ssvs_gibbs_step(model_.unpack(theta), w, selection_,
                                      model_.data(), model_.hyper(), rng);
    theta = model_.pack(next);
  }

 private:
  const SparseRegressionModel& model_;
  const CoresetSelection& selection_;
};

class SliceKernel final : public Kernel {
 public:
  SliceKernel(const Model& model, const CoresetSelection& selection,
              SliceConfig config)
      : model_(model), selection_(selection), config_(config) {}

  void step(Vector& theta, const Weights& w, Rng& rng) const override {
    auto density = [&](const Vector& t) {
      return coreset_log_density(model_, w, selection_, t);
    };
    theta = slice_step(theta, density, config_, rng).theta;
  }

 private:
  const Model& model_;
  const CoresetSelection& selection_;
  SliceConfig config_;
};

}  // namespace

std::unique_ptr<Kernel> make_kernel(const Model& model,
                                    const CoresetSelection& selection,
                                    const SliceConfig& slice) {
  switch (model.kind()) {
    case ModelKind::gaussian_location:
      return std::make_unique<ExactGaussianKernel>(model, selection);
    case ModelKind::sparse_linreg:
      return std::make_unique<SsvsKernel>(
          static_cast<const SparseRegressionModel&>(model), selection);
    default:
      return std::make_unique<SliceKernel>(model, selection, slice);
  }
}

}  // namespace cmcmc

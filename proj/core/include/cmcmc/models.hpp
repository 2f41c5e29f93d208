#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>

#include "cmcmc/types.hpp"

namespace cmcmc {

enum class ModelKind {
  gaussian_location,
  sparse_linreg,
  linreg,
  logreg,
  poissonreg,
  bradley_terry,
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
DataKind data_kind_for(ModelKind kind);

/// Spike-and-slab hyperparameters: sigma^2 ~ InvGamma(nu/2, nu*lambda/2),
/// gamma_i ~ Bern(q), beta_i | gamma_i ~ N(0, (tau or c*tau)^2).
struct SparseHyper {
  double nu = 0.1;
  double lambda = 1.0;
  double q = 0.1;
  double tau = 0.1;
  double c = 10.0;

  bool operator==(const SparseHyper&) const = default;
};

struct ModelSpec {
  ModelKind kind = ModelKind::gaussian_location;
  SparseHyper sparse;

  bool operator==(const ModelSpec&) const = default;
};

/// Per-datum log-likelihood and log-prior over a flat parameter vector.
///
/// Parameter layouts:
///   gaussian_location  theta (d)
///   linreg             [beta (p+1), log sigma^2]
///   logreg             beta (p+1)
///   poissonreg         beta (p+1)
///   bradley_terry      ratings (num_teams)
///   sparse_linreg      [beta (p), sigma^2, gamma (p) as 0/1]
class Model {
 public:
  explicit Model(std::shared_ptr<const Dataset> data);
  virtual ~Model() = default;

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  virtual ModelKind kind() const = 0;
  virtual std::size_t dim() const = 0;

  /// ℓ_n(theta). May be -inf; never NaN for a valid theta.
  virtual double loglik(std::size_t n, const Vector& theta) const = 0;
  virtual double logprior(const Vector& theta) const = 0;
  virtual Vector sample_prior(Rng& rng) const = 0;

  /// Coordinates scored by the z-score metric. Defaults to theta itself.
  virtual Vector metric_coords(const Vector& theta) const { return theta; }
  virtual std::size_t metric_dim() const { return dim(); }

  /// Adds `offset` to the continuous coordinates of a state.
  virtual Vector shift_state(const Vector& theta, double offset) const;

  /// (rows.size()) x (thetas.size()) table of ℓ_{rows[i]}(thetas[k]).
  Matrix loglik_table(std::span<const std::size_t> rows,
                      std::span<const Vector> thetas) const;

  const Dataset& data() const { return *data_; }
  const std::shared_ptr<const Dataset>& data_ptr() const { return data_; }
  std::size_t num_data() const { return data_->size(); }

 private:
  std::shared_ptr<const Dataset> data_;
};

class GaussianLocationModel final : public Model {
 public:
  using Model::Model;
  ModelKind kind() const override { return ModelKind::gaussian_location; }
  std::size_t dim() const override { return data().width(); }
  double loglik(std::size_t n, const Vector& theta) const override;
  double logprior(const Vector& theta) const override;
  Vector sample_prior(Rng& rng) const override;
};

class LinearRegressionModel final : public Model {
 public:
  using Model::Model;
  ModelKind kind() const override { return ModelKind::linreg; }
  std::size_t dim() const override { return data().width() + 2; }
  double loglik(std::size_t n, const Vector& theta) const override;
  double logprior(const Vector& theta) const override;
  Vector sample_prior(Rng& rng) const override;
};

class LogisticRegressionModel final : public Model {
 public:
  using Model::Model;
  ModelKind kind() const override { return ModelKind::logreg; }
  std::size_t dim() const override { return data().width() + 1; }
  double loglik(std::size_t n, const Vector& theta) const override;
  double logprior(const Vector& theta) const override;
  Vector sample_prior(Rng& rng) const override;
};

class PoissonRegressionModel final : public Model {
 public:
  using Model::Model;
  ModelKind kind() const override { return ModelKind::poissonreg; }
  std::size_t dim() const override { return data().width() + 1; }
  double loglik(std::size_t n, const Vector& theta) const override;
  double logprior(const Vector& theta) const override;
  Vector sample_prior(Rng& rng) const override;
};

class BradleyTerryModel final : public Model {
 public:
  static constexpr double kEloScale = 400.0;

  using Model::Model;
  ModelKind kind() const override { return ModelKind::bradley_terry; }
  std::size_t dim() const override {
    return static_cast<std::size_t>(data().num_teams);
  }
  double loglik(std::size_t n, const Vector& theta) const override;
  double logprior(const Vector& theta) const override;
  Vector sample_prior(Rng& rng) const override;
};

struct SparseState {
  Vector beta;
  double sigma2 = 1.0;
  Eigen::VectorXi gamma;
};

class SparseRegressionModel final : public Model {
 public:
  SparseRegressionModel(std::shared_ptr<const Dataset> data, SparseHyper hyper);

  ModelKind kind() const override { return ModelKind::sparse_linreg; }
  std::size_t dim() const override { return 2 * data().width() + 1; }
  double loglik(std::size_t n, const Vector& theta) const override;
  double logprior(const Vector& theta) const override;
  Vector sample_prior(Rng& rng) const override;

  /// beta and sigma^2; the binary inclusion indicators are not scored.
  Vector metric_coords(const Vector& theta) const override;
  std::size_t metric_dim() const override { return data().width() + 1; }
  Vector shift_state(const Vector& theta, double offset) const override;

  const SparseHyper& hyper() const { return hyper_; }

  SparseState unpack(const Vector& theta) const;
  Vector pack(const SparseState& state) const;

 private:
  SparseHyper hyper_;
};

std::unique_ptr<Model> make_model(const ModelSpec& spec,
                                  std::shared_ptr<const Dataset> data);

/// Synthetic-data sizes. `dim` is d for location, p for regressions and
/// the number of teams for Bradley-Terry.
struct SyntheticOptions {
  std::size_t n = 1000;
  std::size_t dim = 2;
  /// Noise sd for sparse regression (25 in the reference setup).
  double noise_sd = 25.0;

  bool operator==(const SyntheticOptions&) const = default;
};

/// Draws a dataset from the generative process associated with `kind`.
/// Gaussian location: x_n ~ N(0, I). Sparse regression: x_n ~ N(0, I),
/// y_n = x_n' beta* + N(0, noise_sd^2) with beta* = (0,...,0,5,...,5).
/// The remaining kinds draw a ground-truth parameter and simulate responses.
Dataset generate_synthetic(ModelKind kind, const SyntheticOptions& options,
                           Rng& rng);

/// (0, ..., 0, 5, ..., 5) with the first floor(p/2) coordinates zero.
Vector sparse_true_coefficients(std::size_t p);

}  // namespace cmcmc

#include "cmcmc/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cmcmc/errors.hpp"

namespace cmcmc {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double linear_predictor(const Dataset& data, std::size_t n, const Vector& beta) {
  const auto row = static_cast<Eigen::Index>(n);
  const auto p = data.features.cols();
  return beta[0] + data.features.row(row).dot(beta.segment(1, p));
}

double normal_logpdf(double x, double mean, double var) {
  const double z = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + z * z / var);
}

Vector standard_normal(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector out(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal(rng);
  return out;
}

double standard_normal_logprior(const Vector& theta) {
  return -0.5 * (static_cast<double>(theta.size()) * kLog2Pi +
                 theta.squaredNorm());
}

void check_dim(const Model& model, const Vector& theta) {
  if (static_cast<std::size_t>(theta.size()) != model.dim()) {
    throw InvalidArgument("parameter has length " +
                          std::to_string(theta.size()) + ", model expects " +
                          std::to_string(model.dim()));
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gaussian_location:
      return "gaussian_location";
    case ModelKind::sparse_linreg:
      return "sparse_linreg";
    case ModelKind::linreg:
      return "linreg";
    case ModelKind::logreg:
      return "logreg";
    case ModelKind::poissonreg:
      return "poissonreg";
    case ModelKind::bradley_terry:
      return "bradley_terry";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto kind : {ModelKind::gaussian_location, ModelKind::sparse_linreg,
                    ModelKind::linreg, ModelKind::logreg,
                    ModelKind::poissonreg, ModelKind::bradley_terry}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown model: " + std::string(name));
}

DataKind data_kind_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::gaussian_location:
      return DataKind::location;
    case ModelKind::sparse_linreg:
    case ModelKind::linreg:
      return DataKind::regression;
    case ModelKind::logreg:
      return DataKind::classification;
    case ModelKind::poissonreg:
      return DataKind::counts;
    case ModelKind::bradley_terry:
      return DataKind::pairwise;
  }
  return DataKind::location;
}

Model::Model(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {
  if (!data_) throw InvalidArgument("model needs a dataset");
}

Vector Model::shift_state(const Vector& theta, double offset) const {
  return theta.array() + offset;
}

Matrix Model::loglik_table(std::span<const std::size_t> rows,
                           std::span<const Vector> thetas) const {
  Matrix table(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(thetas.size()));
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          loglik(rows[i], thetas[k]);
    }
  }
  return table;
}

// Gaussian location -----------------------------------------------------------

double GaussianLocationModel::loglik(std::size_t n, const Vector& theta) const {
  const auto x = data().features.row(static_cast<Eigen::Index>(n)).transpose();
  return -0.5 * (static_cast<double>(theta.size()) * kLog2Pi +
                 (x - theta).squaredNorm());
}

double GaussianLocationModel::logprior(const Vector& theta) const {
  check_dim(*this, theta);
  return standard_normal_logprior(theta);
}

Vector GaussianLocationModel::sample_prior(Rng& rng) const {
  return standard_normal(dim(), rng);
}

// Linear regression -------------------------------------------------------------

double LinearRegressionModel::loglik(std::size_t n, const Vector& theta) const {
  const auto p = static_cast<Eigen::Index>(data().width());
  const double log_var = theta[p + 1];
  const double eta = linear_predictor(data(), n, theta.head(p + 1));
  const double y = data().responses[static_cast<Eigen::Index>(n)];
  const double z = y - eta;
  return -0.5 * (kLog2Pi + log_var + z * z * std::exp(-log_var));
}

double LinearRegressionModel::logprior(const Vector& theta) const {
  check_dim(*this, theta);
  return standard_normal_logprior(theta);
}

Vector LinearRegressionModel::sample_prior(Rng& rng) const {
  return standard_normal(dim(), rng);
}

// Logistic regression -----------------------------------------------------------

double LogisticRegressionModel::loglik(std::size_t n, const Vector& theta) const {
  const double eta = linear_predictor(data(), n, theta);
  const double y = data().responses[static_cast<Eigen::Index>(n)];
  return y * eta - softplus(eta);
}

double LogisticRegressionModel::logprior(const Vector& theta) const {
  check_dim(*this, theta);
  double total = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    total -= std::log(std::numbers::pi) + std::log1p(theta[i] * theta[i]);
  }
  return total;
}

Vector LogisticRegressionModel::sample_prior(Rng& rng) const {
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  Vector out(static_cast<Eigen::Index>(dim()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = cauchy(rng);
  return out;
}

// Poisson regression ------------------------------------------------------------

double PoissonRegressionModel::loglik(std::size_t n, const Vector& theta) const {
  const double rate = softplus(linear_predictor(data(), n, theta));
  const double y = data().responses[static_cast<Eigen::Index>(n)];
  const double log_fact = std::lgamma(y + 1.0);
  if (rate == 0.0) {
    return y > 0.0 ? -std::numeric_limits<double>::infinity() : -log_fact;
  }
  return y * std::log(rate) - rate - log_fact;
}

double PoissonRegressionModel::logprior(const Vector& theta) const {
  check_dim(*this, theta);
  return standard_normal_logprior(theta);
}

Vector PoissonRegressionModel::sample_prior(Rng& rng) const {
  return standard_normal(dim(), rng);
}

// Bradley-Terry -----------------------------------------------------------------

double BradleyTerryModel::loglik(std::size_t n, const Vector& theta) const {
  const auto& pair = data().pairs[n];
  const double z = (theta[pair.visitor] - theta[pair.home]) / kEloScale;
  const double y = data().responses[static_cast<Eigen::Index>(n)];
  // P(home wins) = 1 / (1 + e^z).
  return y == 1.0 ? -softplus(z) : -softplus(-z);
}

double BradleyTerryModel::logprior(const Vector& theta) const {
  check_dim(*this, theta);
  return standard_normal_logprior(theta);
}

Vector BradleyTerryModel::sample_prior(Rng& rng) const {
  return standard_normal(dim(), rng);
}

// Sparse regression -------------------------------------------------------------

SparseRegressionModel::SparseRegressionModel(std::shared_ptr<const Dataset> data,
                                             SparseHyper hyper)
    : Model(std::move(data)), hyper_(hyper) {
  if (hyper_.nu <= 0 || hyper_.lambda <= 0 || hyper_.tau <= 0 ||
      hyper_.c <= 0 || hyper_.q < 0 || hyper_.q > 1) {
    throw InvalidArgument("invalid spike-and-slab hyperparameters");
  }
}

SparseState SparseRegressionModel::unpack(const Vector& theta) const {
  check_dim(*this, theta);
  const auto p = static_cast<Eigen::Index>(data().width());
  SparseState s;
  s.beta = theta.head(p);
  s.sigma2 = theta[p];
  s.gamma = theta.tail(p).unaryExpr([](double g) { return g != 0.0 ? 1.0 : 0.0; })
                .cast<int>();
  return s;
}

Vector SparseRegressionModel::pack(const SparseState& state) const {
  const auto p = static_cast<Eigen::Index>(data().width());
  Vector theta(2 * p + 1);
  theta.head(p) = state.beta;
  theta[p] = state.sigma2;
  theta.tail(p) = state.gamma.cast<double>();
  return theta;
}

double SparseRegressionModel::loglik(std::size_t n, const Vector& theta) const {
  const auto p = static_cast<Eigen::Index>(data().width());
  const auto row = static_cast<Eigen::Index>(n);
  const double mean = data().features.row(row).dot(theta.head(p));
  return normal_logpdf(data().responses[row], mean, theta[p]);
}

double SparseRegressionModel::logprior(const Vector& theta) const {
  check_dim(*this, theta);
  const auto p = static_cast<Eigen::Index>(data().width());
  const double sigma2 = theta[p];
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(sigma2 > 0.0)) return kNegInf;

  const double a = hyper_.nu / 2.0;
  const double b = hyper_.nu * hyper_.lambda / 2.0;
  double total = a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(sigma2) -
                 b / sigma2;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double g = theta[p + 1 + i];
    if (g != 0.0 && g != 1.0) return kNegInf;
    total += g == 1.0 ? std::log(hyper_.q) : std::log1p(-hyper_.q);
    const double sd = g == 1.0 ? hyper_.c * hyper_.tau : hyper_.tau;
    total += normal_logpdf(theta[i], 0.0, sd * sd);
  }
  return total;
}

Vector SparseRegressionModel::sample_prior(Rng& rng) const {
  const auto p = static_cast<Eigen::Index>(data().width());
  std::bernoulli_distribution include(hyper_.q);
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma(hyper_.nu / 2.0,
                                        2.0 / (hyper_.nu * hyper_.lambda));
  SparseState s;
  s.gamma.resize(p);
  s.beta.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    s.gamma[i] = include(rng) ? 1 : 0;
    const double sd = s.gamma[i] ? hyper_.c * hyper_.tau : hyper_.tau;
    s.beta[i] = sd * normal(rng);
  }
  // A Gamma(nu/2) draw with nu = 0.1 can underflow to 0.
  double g = 0.0;
  do {
    g = gamma(rng);
  } while (!(g > 0.0) || !std::isfinite(1.0 / g));
  s.sigma2 = 1.0 / g;
  return pack(s);
}

Vector SparseRegressionModel::metric_coords(const Vector& theta) const {
  const auto p = static_cast<Eigen::Index>(data().width());
  return theta.head(p + 1);
}

Vector SparseRegressionModel::shift_state(const Vector& theta,
                                          double offset) const {
  const auto p = static_cast<Eigen::Index>(data().width());
  Vector out = theta;
  out.head(p).array() += offset;
  return out;
}

// Factory / synthetic data -------------------------------------------------------

std::unique_ptr<Model> make_model(const ModelSpec& spec,
                                  std::shared_ptr<const Dataset> data) {
  if (!data) throw InvalidArgument("model needs a dataset");
  if (data->kind != data_kind_for(spec.kind)) {
    throw InvalidArgument(std::string("model ") + std::string(to_string(spec.kind)) +
                          " needs " +
                          std::string(to_string(data_kind_for(spec.kind))) +
                          " data");
  }
  switch (spec.kind) {
    case ModelKind::gaussian_location:
      return std::make_unique<GaussianLocationModel>(std::move(data));
    case ModelKind::sparse_linreg:
      return std::make_unique<SparseRegressionModel>(std::move(data),
                                                     spec.sparse);
    case ModelKind::linreg:
      return std::make_unique<LinearRegressionModel>(std::move(data));
    case ModelKind::logreg:
      return std::make_unique<LogisticRegressionModel>(std::move(data));
    case ModelKind::poissonreg:
      return std::make_unique<PoissonRegressionModel>(std::move(data));
    case ModelKind::bradley_terry:
      return std::make_unique<BradleyTerryModel>(std::move(data));
  }
  throw UnsupportedModel("unknown model kind");
}

Vector sparse_true_coefficients(std::size_t p) {
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t i = p / 2; i < p; ++i) beta[static_cast<Eigen::Index>(i)] = 5.0;
  return beta;
}

Dataset generate_synthetic(ModelKind kind, const SyntheticOptions& options,
                           Rng& rng) {
  if (options.n < 1 || options.dim < 1) {
    throw InvalidArgument("synthetic sizes must be positive");
  }
  const auto n = static_cast<Eigen::Index>(options.n);
  const auto p = static_cast<Eigen::Index>(options.dim);
  std::normal_distribution<double> normal;

  Dataset data;
  data.kind = data_kind_for(kind);

  if (kind == ModelKind::bradley_terry) {
    if (options.dim < 2) throw InvalidArgument("need at least two teams");
    Vector ratings(p);
    for (Eigen::Index i = 0; i < p; ++i) ratings[i] = 100.0 * normal(rng);
    std::uniform_int_distribution<int> team(0, static_cast<int>(p) - 1);
    std::uniform_real_distribution<double> unif;
    data.num_teams = static_cast<int>(p);
    data.features.resize(n, 0);
    data.responses.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Pair pair{team(rng), team(rng)};
      while (pair.visitor == pair.home) pair.visitor = team(rng);
      const double z = (ratings[pair.visitor] - ratings[pair.home]) /
                       BradleyTerryModel::kEloScale;
      data.responses[i] = unif(rng) < 1.0 / (1.0 + std::exp(z)) ? 1.0 : 0.0;
      data.pairs.push_back(pair);
    }
    return data;
  }

  data.features.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) data.features(i, j) = normal(rng);
  }
  if (kind == ModelKind::gaussian_location) return data;

  data.responses.resize(n);
  Vector beta(p + 1);
  for (Eigen::Index j = 0; j <= p; ++j) beta[j] = normal(rng);

  switch (kind) {
    case ModelKind::sparse_linreg: {
      const Vector truth = sparse_true_coefficients(options.dim);
      for (Eigen::Index i = 0; i < n; ++i) {
        data.responses[i] = data.features.row(i).dot(truth) +
                            options.noise_sd * normal(rng);
      }
      break;
    }
    case ModelKind::linreg:
      for (Eigen::Index i = 0; i < n; ++i) {
        data.responses[i] = linear_predictor(data, static_cast<std::size_t>(i), beta) +
                            normal(rng);
      }
      break;
    case ModelKind::logreg: {
      std::uniform_real_distribution<double> unif;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double eta = linear_predictor(data, static_cast<std::size_t>(i), beta);
        data.responses[i] = unif(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
      }
      break;
    }
    case ModelKind::poissonreg:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double rate =
            softplus(linear_predictor(data, static_cast<std::size_t>(i), beta));
        std::poisson_distribution<long> poisson(rate);
        data.responses[i] = static_cast<double>(poisson(rng));
      }
      break;
    default:
      break;
  }
  return data;
}

}  // namespace cmcmc

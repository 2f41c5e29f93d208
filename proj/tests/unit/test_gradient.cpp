#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "cmcmc/coreset.hpp"
#include "cmcmc/errors.hpp"
#include "cmcmc/gradient.hpp"
#include "cmcmc/kernels.hpp"
#include "cmcmc/metrics.hpp"
#include "oracles.hpp"

using namespace cmcmc;

namespace {

std::shared_ptr<Dataset> gaussian_data(std::size_t n, std::size_t d, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  SyntheticOptions opts;
  opts.n = n;
  opts.dim = d;
  return std::make_shared<Dataset>(generate_synthetic(ModelKind::gaussian_location, opts, rng));
}

std::shared_ptr<Dataset> data_1d(const std::vector<double>& xs) {
  auto data = std::make_shared<Dataset>();
  data->features.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) data->features(static_cast<Eigen::Index>(i), 0) = xs[i];
  return data;
}

// Direct evaluation of the estimator display, loop by loop.
Vector naive_estimate(const Weights& w, const Matrix& raw_coreset, const Matrix& raw_sub, double N) {
  const auto K = raw_coreset.cols();
  auto centered = [&](const Matrix& t, Eigen::Index r, Eigen::Index k) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) mean += t(r, j);
    return t(r, k) - mean / static_cast<double>(K);
  };
  Vector g = Vector::Zero(raw_coreset.rows());
  for (Eigen::Index m = 0; m < raw_coreset.rows(); ++m) {
    for (Eigen::Index k = 0; k < K; ++k) {
      double inner = 0.0;
      for (Eigen::Index mm = 0; mm < raw_coreset.rows(); ++mm) inner += w[mm] * centered(raw_coreset, mm, k);
      double sub = 0.0;
      for (Eigen::Index s = 0; s < raw_sub.rows(); ++s) sub += centered(raw_sub, s, k);
      inner -= N / static_cast<double>(raw_sub.rows()) * sub;
      g[m] += centered(raw_coreset, m, k) * inner;
    }
    g[m] /= static_cast<double>(K - 1);
  }
  return g;
}

}  // namespace

TEST(CenterLogliks, Examples) {
  Matrix a(1, 2);
  a << 1, 3;
  EXPECT_EQ(center_logliks(a), (Matrix(1, 2) << -1, 1).finished());
  Matrix b = Matrix::Constant(1, 3, 4.2);
  EXPECT_EQ(center_logliks(b), Matrix::Zero(1, 3));
  Matrix c(1, 2);
  c << 2, 0;
  EXPECT_EQ(center_logliks(c), (Matrix(1, 2) << 1, -1).finished());
}

TEST(CenterLogliks, RowsSumToZero) {
  auto rng = make_stream(1, 0);
  std::normal_distribution<double> n01;
  Matrix t(20, 5);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = 100.0 * n01(rng);
  const Matrix c = center_logliks(t);
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    EXPECT_LE(std::abs(c.row(r).sum()), 1e-10 * t.row(r).cwiseAbs().sum());
  }
}

TEST(CenterLogliks, NeedsTwoChains) {
  EXPECT_THROW(center_logliks(Matrix::Zero(3, 1)), InvalidArgument);
}

TEST(EstimateGradient, HandExample) {
  Matrix table(2, 2);
  table << 1, 3, 2, 0;
  const Matrix c = center_logliks(table);
  Weights w(1);
  w << 2.0;
  const Vector g = estimate_gradient(w, c.topRows(1), c, 2);
  ASSERT_EQ(g.size(), 1);
  EXPECT_DOUBLE_EQ(g[0], 4.0);
  EXPECT_DOUBLE_EQ(naive_estimate(w, table.topRows(1), table, 2.0)[0], 4.0);
}

TEST(EstimateGradient, MatchesNaiveSummation) {
  auto rng = make_stream(2, 0);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index M = 4, S = 3, K = 5;
    Matrix core(M, K), sub(S, K);
    for (Eigen::Index i = 0; i < core.size(); ++i) core.data()[i] = n01(rng);
    for (Eigen::Index i = 0; i < sub.size(); ++i) sub.data()[i] = n01(rng);
    Weights w = Vector::Random(M).cwiseAbs() * 3.0;
    const Vector fast = estimate_gradient(w, center_logliks(core), center_logliks(sub), 17);
    const Vector slow = naive_estimate(w, core, sub, 17.0);
    EXPECT_TRUE(fast.isApprox(slow, 1e-12));
  }
}

TEST(EstimateGradient, IdenticalStatesGiveZero) {
  auto data = gaussian_data(10, 2, 3);
  GaussianLocationModel model(data);
  CoresetSelection sel{{0, 1, 2}};
  std::vector<Vector> states(3, Vector::Constant(2, 0.7));
  auto rng = make_stream(3, 1);
  const auto est = compute_gradient(model, Weights::Constant(3, 2.0), sel, states, 4, rng);
  EXPECT_EQ(est.g, Vector::Zero(3));
}

TEST(EstimateGradient, FullCoresetCancelsExactly) {
  auto data = gaussian_data(8, 3, 4);
  GaussianLocationModel model(data);
  CoresetSelection sel{{0, 1, 2, 3, 4, 5, 6, 7}};
  auto rng = make_stream(4, 1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Vector> states{model.sample_prior(rng), model.sample_prior(rng)};
    std::vector<std::size_t> all(8);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto est = compute_gradient(model, Weights::Ones(8), sel, states, all);
    EXPECT_EQ(est.g, Vector::Zero(8));
  }
}

TEST(EstimateGradient, DimensionErrors) {
  Matrix c = Matrix::Zero(2, 2);
  EXPECT_THROW(estimate_gradient(Weights::Ones(3), c, c, 4), InvalidArgument);
  EXPECT_THROW(estimate_gradient(Weights::Ones(2), c, Matrix::Zero(2, 3), 4), InvalidArgument);
  EXPECT_THROW(estimate_gradient(Weights::Ones(2), Matrix::Zero(2, 1), Matrix::Zero(2, 1), 4),
               InvalidArgument);
}

TEST(EstimateGradient, LinearInWeights) {
  auto data = gaussian_data(20, 2, 5);
  GaussianLocationModel model(data);
  CoresetSelection sel{{3, 7, 11}};
  auto rng = make_stream(5, 1);
  std::vector<Vector> states{model.sample_prior(rng), model.sample_prior(rng), model.sample_prior(rng)};
  std::vector<std::size_t> sub{0, 5, 9, 13};
  const Matrix table = center_logliks(model.loglik_table(std::vector<std::size_t>{3, 7, 11, 0, 5, 9, 13}, states));
  Weights w1(3), w2(3);
  w1 << 1, 2, 3;
  w2 << 0.5, 0, 4;
  auto g = [&](const Weights& w) { return estimate_gradient(w, table.topRows(3), table.bottomRows(4), 20); };
  const Vector zero_w = g(Weights::Zero(3));
  const Vector lhs = g(2.0 * w1 + 3.0 * w2) - zero_w;
  const Vector rhs = 2.0 * (g(w1) - zero_w) + 3.0 * (g(w2) - zero_w);
  EXPECT_TRUE(lhs.isApprox(rhs, 1e-10));
}

TEST(EstimateGradient, SubsampleUnbiasedOverAllSubsets) {
  auto data = gaussian_data(6, 2, 6);
  GaussianLocationModel model(data);
  CoresetSelection sel{{1, 4}};
  auto rng = make_stream(6, 1);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<Vector> states{model.sample_prior(rng), model.sample_prior(rng)};
    Weights w(2);
    w << 2.5, 0.75 + rep;
    const Vector full = compute_gradient(model, w, sel, states, std::vector<std::size_t>{0, 1, 2, 3, 4, 5}).g;
    Vector avg = Vector::Zero(2);
    int count = 0;
    for (std::size_t a = 0; a < 6; ++a) {
      for (std::size_t b = a + 1; b < 6; ++b) {
        avg += compute_gradient(model, w, sel, states, std::vector<std::size_t>{a, b}).g;
        ++count;
      }
    }
    ASSERT_EQ(count, 15);
    avg /= count;
    for (int m = 0; m < 2; ++m) EXPECT_NEAR(avg[m], full[m], 1e-9 * std::abs(full[m]));
  }
}

TEST(DrawSubsample, Examples) {
  auto rng = make_stream(7, 0);
  auto all = draw_subsample(9, 9, rng);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(all[i], i);
  EXPECT_EQ(draw_subsample(1, 1, rng), std::vector<std::size_t>{0});
  auto a = make_stream(8, 2);
  auto b = make_stream(8, 2);
  EXPECT_EQ(draw_subsample(100, 10, a), draw_subsample(100, 10, b));
  EXPECT_THROW(draw_subsample(3, 4, rng), InvalidArgument);
  EXPECT_THROW(draw_subsample(3, 0, rng), InvalidArgument);
}

TEST(DrawSubsample, DistinctAndUniform) {
  auto rng = make_stream(9, 0);
  const std::size_t N = 10, S = 3, reps = 30000;
  std::vector<double> hits(N, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto s = draw_subsample(N, S, rng);
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), S);
    for (auto i : s) hits[i] += 1.0;
  }
  // Inclusion probability S/N; binomial sd per index.
  const double p = static_cast<double>(S) / N;
  const double sd = std::sqrt(reps * p * (1 - p));
  for (double h : hits) EXPECT_NEAR(h, reps * p, 4.0 * sd);
}

TEST(ExactKlGradient, ZeroAtExactCoreset) {
  auto data = gaussian_data(12, 3, 10);
  GaussianLocationModel model(data);
  CoresetSelection sel;
  for (std::size_t i = 0; i < 12; ++i) sel.indices.push_back(i);
  const Vector g = exact_kl_gradient(model, Weights::Ones(12), sel);
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExactKlGradient, OneDimensionalQuadrature) {
  auto data = data_1d({1.0, -1.0});
  GaussianLocationModel model(data);
  CoresetSelection sel{{0}};
  Weights w(1);
  w << 2.0;
  const auto grid = oracle::location_posterior_1d({1.0}, {2.0}, -12.0, 12.0);
  const auto expected = oracle::kl_gradient_on_grid(grid, {1.0}, {2.0}, {1.0, -1.0});
  EXPECT_NEAR(exact_kl_gradient(model, w, sel)[0], expected[0], 1e-8);
}

TEST(ExactKlGradient, MatchesQuadratureOnRandomInstances) {
  auto rng = make_stream(11, 0);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> xs(7);
    for (auto& x : xs) x = n01(rng);
    auto data = data_1d(xs);
    GaussianLocationModel model(data);
    CoresetSelection sel{{0, 3, 5}};
    std::vector<double> w{unif(rng), unif(rng), unif(rng)};
    const auto grid = oracle::location_posterior_1d({xs[0], xs[3], xs[5]}, w, -15.0, 15.0);
    const auto expected = oracle::kl_gradient_on_grid(grid, {xs[0], xs[3], xs[5]}, w, xs);
    const Vector g = exact_kl_gradient(model, Eigen::Map<const Vector>(w.data(), 3), sel);
    for (int m = 0; m < 3; ++m) EXPECT_NEAR(g[m], expected[static_cast<std::size_t>(m)], 1e-7);
  }
}

TEST(ExactKlGradient, IsDerivativeOfKl) {
  auto data = gaussian_data(30, 2, 12);
  GaussianLocationModel model(data);
  CoresetSelection sel{{2, 9, 17, 25}};
  Weights w(4);
  w << 5.0, 9.0, 7.5, 11.0;
  const Vector g = exact_kl_gradient(model, w, sel);
  const double h = 1e-5;
  for (int m = 0; m < 4; ++m) {
    Weights up = w, down = w;
    up[m] += h;
    down[m] -= h;
    const double fd = (gaussian_kl(up, sel, *data) - gaussian_kl(down, sel, *data)) / (2 * h);
    EXPECT_NEAR(g[m], fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(ExactKlGradient, UnsupportedModel) {
  auto rng = make_stream(13, 0);
  SyntheticOptions opts;
  opts.n = 10;
  auto data = std::make_shared<Dataset>(generate_synthetic(ModelKind::logreg, opts, rng));
  LogisticRegressionModel model(data);
  EXPECT_THROW(exact_kl_gradient(model, Weights::Ones(2), CoresetSelection{{0, 1}}), UnsupportedModel);
}

TEST(EstimateGradient, UnbiasedForIidDraws) {
  auto data = gaussian_data(100, 2, 14);
  GaussianLocationModel model(data);
  auto rng = make_stream(14, 1);
  auto sel = select_coreset(*data, 5, false, rng);
  Weights w(5);
  w << 10, 30, 15, 25, 20;
  const Vector exact = exact_kl_gradient(model, w, sel);
  const int reps = 100000;
  Vector sum = Vector::Zero(5), sq = Vector::Zero(5);
  std::vector<Vector> states(2);
  for (int r = 0; r < reps; ++r) {
    for (auto& s : states) s = gaussian_exact_step(w, sel, *data, rng);
    const Vector g = compute_gradient(model, w, sel, states, 5, rng).g;
    sum += g;
    sq += g.cwiseAbs2();
  }
  const Vector mean = sum / reps;
  const Vector se = ((sq / reps - mean.cwiseAbs2()) / (reps - 1)).cwiseSqrt();
  for (int m = 0; m < 5; ++m) EXPECT_LE(std::abs(mean[m] - exact[m]), 3.0 * se[m]) << "coordinate " << m;
}

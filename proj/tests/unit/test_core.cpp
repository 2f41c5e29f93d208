#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "cmcmc/coreset.hpp"
#include "cmcmc/dataset_io.hpp"
#include "cmcmc/errors.hpp"
#include "cmcmc/models.hpp"

using namespace cmcmc;

namespace {

// Model whose per-datum log-likelihood is a fixed table, independent of θ.
class TableModel final : public Model {
 public:
  TableModel(std::shared_ptr<const Dataset> data, std::vector<double> values)
      : Model(std::move(data)), values_(std::move(values)) {}
  ModelKind kind() const override { return ModelKind::gaussian_location; }
  std::size_t dim() const override { return 1; }
  double loglik(std::size_t n, const Vector&) const override { return values_[n]; }
  double logprior(const Vector&) const override { return 0.0; }
  Vector sample_prior(Rng&) const override { return Vector::Zero(1); }

 private:
  std::vector<double> values_;
};

std::shared_ptr<Dataset> location_data(std::size_t n, std::size_t d) {
  auto data = std::make_shared<Dataset>();
  data->kind = DataKind::location;
  data->features = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  return data;
}

Dataset labels(const std::vector<int>& y) {
  Dataset data;
  data.kind = DataKind::classification;
  data.features = Matrix::Zero(static_cast<Eigen::Index>(y.size()), 1);
  data.responses.resize(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) data.responses[static_cast<Eigen::Index>(i)] = y[i];
  return data;
}

std::size_t count_positive(const Dataset& data, const CoresetSelection& sel) {
  return static_cast<std::size_t>(std::count_if(sel.indices.begin(), sel.indices.end(), [&](std::size_t i) {
    return data.responses[static_cast<Eigen::Index>(i)] == 1.0;
  }));
}

}  // namespace

TEST(SelectCoreset, FullSelectionIsPermutation) {
  auto data = location_data(10, 1);
  auto rng = make_stream(1, 0);
  auto sel = select_coreset(*data, 10, false, rng);
  std::vector<std::size_t> sorted = sel.indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(SelectCoreset, RarePositiveAlwaysIncluded) {
  auto data = labels({0, 0, 0, 1, 0, 0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = make_stream(seed, 0);
    auto sel = select_coreset(data, 4, true, rng);
    EXPECT_EQ(sel.size(), 4u);
    EXPECT_NE(std::find(sel.indices.begin(), sel.indices.end(), 3u), sel.indices.end());
  }
}

TEST(SelectCoreset, BalancedHalfAndHalf) {
  std::vector<int> y(100, 0);
  std::fill(y.begin(), y.begin() + 40, 1);
  auto data = labels(y);
  auto rng = make_stream(3, 0);
  auto sel = select_coreset(data, 10, true, rng);
  EXPECT_EQ(count_positive(data, sel), 5u);
  EXPECT_EQ(sel.size() - count_positive(data, sel), 5u);
}

TEST(SelectCoreset, OddSizeTakesCeilPositives) {
  std::vector<int> y(50, 0);
  std::fill(y.begin(), y.begin() + 20, 1);
  auto data = labels(y);
  auto rng = make_stream(4, 0);
  auto sel = select_coreset(data, 7, true, rng);
  EXPECT_EQ(count_positive(data, sel), 4u);
}

TEST(SelectCoreset, TieIncludesAllPositives) {
  auto data = labels({1, 0, 1, 0, 0, 0});
  auto rng = make_stream(5, 0);
  auto sel = select_coreset(data, 4, true, rng);
  EXPECT_EQ(count_positive(data, sel), 2u);
}

TEST(SelectCoreset, Errors) {
  auto data = location_data(5, 1);
  auto rng = make_stream(0, 0);
  EXPECT_THROW(select_coreset(*data, 6, false, rng), InvalidArgument);
  EXPECT_THROW(select_coreset(*data, 0, false, rng), InvalidArgument);
  EXPECT_THROW(select_coreset(*data, 2, true, rng), InvalidArgument);
  auto few_neg = labels({1, 1, 1, 1, 1, 0});
  EXPECT_THROW(select_coreset(few_neg, 5, true, rng), InvalidArgument);
}

TEST(SelectCoreset, DeterministicAndDistinct) {
  auto data = location_data(200, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto a = make_stream(seed, 1);
    auto b = make_stream(seed, 1);
    auto s1 = select_coreset(*data, 50, false, a);
    auto s2 = select_coreset(*data, 50, false, b);
    EXPECT_EQ(s1.indices, s2.indices);
    EXPECT_EQ(std::set<std::size_t>(s1.indices.begin(), s1.indices.end()).size(), 50u);
    for (auto i : s1.indices) EXPECT_LT(i, 200u);
  }
}

TEST(InitWeights, Examples) {
  EXPECT_TRUE(init_weights(100, 10).isApprox(Weights::Constant(10, 10.0)));
  EXPECT_TRUE(init_weights(7, 7).isApprox(Weights::Constant(7, 1.0)));
  EXPECT_TRUE(init_weights(3, 2).isApprox(Weights::Constant(2, 1.5)));
  EXPECT_THROW(init_weights(3, 0), InvalidArgument);
}

TEST(InitWeights, SumsToN) {
  for (std::size_t N : {1u, 7u, 1000u, 12345u}) {
    for (std::size_t M : {1u, 3u, 7u}) {
      if (M > N) continue;
      const double sum = init_weights(N, M).sum();
      EXPECT_NEAR(sum, static_cast<double>(N), 1e-12 * static_cast<double>(N));
    }
  }
}

TEST(LogPotential, ZeroWeights) {
  auto data = location_data(2, 1);
  TableModel model(data, {0.5, -1.0});
  CoresetSelection sel{{0, 1}};
  EXPECT_EQ(log_potential(Weights::Zero(2), Vector::Zero(1), model, sel), 0.0);
}

TEST(LogPotential, Arithmetic) {
  auto data = location_data(2, 1);
  TableModel model(data, {0.5, -1.0});
  CoresetSelection sel{{0, 1}};
  Weights w(2);
  w << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(log_potential(w, Vector::Zero(1), model, sel), -1.5);
}

TEST(LogPotential, GaussianAtOrigin) {
  for (std::size_t d : {1u, 2u, 5u}) {
    auto data = location_data(1, d);
    GaussianLocationModel model(data);
    CoresetSelection sel{{0}};
    const double expected = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
    EXPECT_NEAR(log_potential(Weights::Ones(1), Vector::Zero(static_cast<Eigen::Index>(d)), model, sel),
                expected, 1e-12);
  }
}

TEST(LogPotential, NaNIsError) {
  auto data = location_data(1, 1);
  TableModel model(data, {std::nan("")});
  CoresetSelection sel{{0}};
  EXPECT_THROW(log_potential(Weights::Ones(1), Vector::Zero(1), model, sel), NumericalError);
}

TEST(LogPotential, NegativeInfinityIsLegal) {
  auto data = location_data(1, 1);
  TableModel model(data, {-std::numeric_limits<double>::infinity()});
  CoresetSelection sel{{0}};
  EXPECT_EQ(log_potential(Weights::Ones(1), Vector::Zero(1), model, sel),
            -std::numeric_limits<double>::infinity());
}

TEST(LogPotential, LinearInWeights) {
  auto rng = make_stream(9, 0);
  SyntheticOptions opts;
  opts.n = 30;
  opts.dim = 3;
  auto data = std::make_shared<Dataset>(generate_synthetic(ModelKind::gaussian_location, opts, rng));
  GaussianLocationModel model(data);
  auto sel = select_coreset(*data, 8, false, rng);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    Weights w1(8), w2(8);
    for (int i = 0; i < 8; ++i) {
      w1[i] = unif(rng);
      w2[i] = unif(rng);
    }
    const double a = unif(rng);
    const double b = unif(rng);
    Vector theta = model.sample_prior(rng);
    const double lhs = log_potential(a * w1 + b * w2, theta, model, sel);
    const double rhs = a * log_potential(w1, theta, model, sel) + b * log_potential(w2, theta, model, sel);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
  }
}

TEST(ChainEnsemble, NeedsTwoChains) {
  EXPECT_THROW(ChainEnsemble({Vector::Zero(1)}), InvalidArgument);
  ChainEnsemble e({Vector::Zero(1), Vector::Zero(1)});
  std::vector<double> p{1.0, 2.0};
  e.record(p);
  e.record(p);
  EXPECT_EQ(e.history_length(), 2u);
  std::vector<double> bad{1.0};
  EXPECT_THROW(e.record(bad), InvalidArgument);
}

TEST(Dataset, Validate) {
  auto bad_label = labels({0, 2});
  EXPECT_THROW(bad_label.validate(), InvalidArgument);
  Dataset counts;
  counts.kind = DataKind::counts;
  counts.features = Matrix::Zero(2, 1);
  counts.responses = Vector::Constant(2, -1.0);
  EXPECT_THROW(counts.validate(), InvalidArgument);
  Dataset pairs;
  pairs.kind = DataKind::pairwise;
  pairs.pairs = {{0, 3}};
  pairs.responses = Vector::Ones(1);
  pairs.num_teams = 3;
  EXPECT_THROW(pairs.validate(), InvalidArgument);
  Dataset empty;
  EXPECT_THROW(empty.validate(), InvalidArgument);
}

TEST(MakeStream, DistinctAndReproducible) {
  auto a = make_stream(1, 0);
  auto b = make_stream(1, 0);
  auto c = make_stream(1, 1);
  auto d = make_stream(2, 0);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

class DatasetCsv : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "cmcmc_test_core_csv";
  void SetUp() override { std::filesystem::create_directories(dir); }
  void TearDown() override { std::filesystem::remove_all(dir); }
  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
  }
};

TEST_F(DatasetCsv, RegressionColumns) {
  write("r.csv", "a,target,b\n1.5,2,3\n-4e-1,5,6\n");
  auto data = read_dataset_csv(dir / "r.csv", DataKind::regression, "target");
  ASSERT_EQ(data.size(), 2u);
  ASSERT_EQ(data.width(), 2u);
  EXPECT_DOUBLE_EQ(data.features(1, 0), -0.4);
  EXPECT_DOUBLE_EQ(data.features(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(data.responses[1], 5.0);
}

TEST_F(DatasetCsv, Pairwise) {
  write("p.csv", "home_id,visitor_id,outcome\n0,2,1\n2,1,0\n");
  auto data = read_dataset_csv(dir / "p.csv", DataKind::pairwise);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data.num_teams, 3);
  EXPECT_EQ(data.pairs[1], (Pair{2, 1}));
}

TEST_F(DatasetCsv, Errors) {
  EXPECT_THROW(read_dataset_csv(dir / "missing.csv", DataKind::location), IoError);
  write("bad.csv", "x,y\n1,abc\n");
  EXPECT_THROW(read_dataset_csv(dir / "bad.csv", DataKind::regression), IoError);
  write("nocol.csv", "x,z\n1,2\n");
  EXPECT_THROW(read_dataset_csv(dir / "nocol.csv", DataKind::regression), IoError);
}

TEST_F(DatasetCsv, RoundTrip) {
  auto rng = make_stream(2, 0);
  SyntheticOptions opts;
  opts.n = 25;
  opts.dim = 3;
  auto data = generate_synthetic(ModelKind::poissonreg, opts, rng);
  write_dataset_csv(data, dir / "rt.csv");
  auto back = read_dataset_csv(dir / "rt.csv", DataKind::counts);
  EXPECT_EQ(back.features, data.features);
  EXPECT_EQ(back.responses, data.responses);
}

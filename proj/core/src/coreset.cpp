#include "cmcmc/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmcmc/errors.hpp"

namespace cmcmc {
namespace {

// Partial Fisher-Yates: the first k entries of `pool` become a uniform
// sample without replacement.
std::vector<std::size_t> sample_from(std::vector<std::size_t> pool,
                                     std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

CoresetSelection select_coreset(const Dataset& data, std::size_t M,
                                bool balance, Rng& rng) {
  const std::size_t N = data.size();
  if (M < 1) throw InvalidArgument("coreset size must be at least 1");
  if (M > N) throw InvalidArgument("coreset size exceeds the number of data");

  if (!balance) {
    std::vector<std::size_t> all(N);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return {sample_from(std::move(all), M, rng)};
  }
  if (data.kind != DataKind::classification) {
    throw InvalidArgument("class balancing needs classification data");
  }

  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t n = 0; n < N; ++n) {
    (data.responses[static_cast<Eigen::Index>(n)] == 1.0 ? positives
                                                         : negatives)
        .push_back(n);
  }

  std::size_t n_pos = 0;
  if (M > 2 * positives.size() || M == 2 * positives.size()) {
    // Also covers #positives = M/2 exactly: every positive is taken.
    n_pos = positives.size();
  } else {
    n_pos = (M + 1) / 2;
  }
  const std::size_t n_neg = M - n_pos;
  if (n_neg > negatives.size()) {
    throw InvalidArgument("not enough negatives to fill a balanced coreset");
  }

  auto chosen = sample_from(std::move(positives), n_pos, rng);
  auto neg = sample_from(std::move(negatives), n_neg, rng);
  chosen.insert(chosen.end(), neg.begin(), neg.end());
  return {std::move(chosen)};
}

Weights init_weights(std::size_t N, std::size_t M) {
  if (M < 1 || N < 1) throw InvalidArgument("N and M must be positive");
  return Weights::Constant(static_cast<Eigen::Index>(M),
                           static_cast<double>(N) / static_cast<double>(M));
}

double log_potential(const Weights& w, const Vector& theta, const Model& model,
                     const CoresetSelection& selection) {
  if (static_cast<std::size_t>(w.size()) != selection.size()) {
    throw InvalidArgument("weight and coreset sizes differ");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < selection.size(); ++m) {
    const double wm = w[static_cast<Eigen::Index>(m)];
    if (wm == 0.0) continue;
    const double ll = model.loglik(selection.indices[m], theta);
    if (std::isnan(ll)) throw NumericalError("NaN log-likelihood");
    total += wm * ll;
  }
  return total;
}

}  // namespace cmcmc

#include "cmcmc/hotstart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmcmc/errors.hpp"

namespace cmcmc {
namespace {

struct SegmentFit {
  double mean = 0.0;
  double rss = 0.0;
};

// OLS of y_j on the 1-based iteration index j over [begin, end). Values are
// taken relative to `ref` so constant traces give exactly zero spread.
SegmentFit fit_segment(std::span<const double> trace, std::size_t begin,
                       std::size_t end, double ref) {
  const auto len = static_cast<double>(end - begin);
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += trace[i] - ref;
  const double y_bar = sum / len;
  const double j_bar = 0.5 * static_cast<double>(begin + 1 + end);

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dj = static_cast<double>(i + 1) - j_bar;
    const double dy = (trace[i] - ref) - y_bar;
    sxx += dj * dj;
    sxy += dj * dy;
    syy += dy * dy;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double rss = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dj = static_cast<double>(i + 1) - j_bar;
    const double r = (trace[i] - ref) - y_bar - slope * dj;
    rss += r * r;
  }
  // Round-off residue of an exact line counts as a perfect fit.
  if (rss <= 1e-24 * syy) rss = 0.0;
  return {ref + y_bar, rss};
}

}  // namespace

SegmentStats segment_stats(std::span<const double> trace) {
  const std::size_t t = trace.size();
  if (t < 9) throw NotReady("hot-start statistics need at least 9 iterations");
  const std::size_t n = (t + 2) / 3;
  const double ref = trace[n];
  const auto first = fit_segment(trace, n, 2 * n, ref);
  const auto second = fit_segment(trace, 2 * n, t, ref);
  const double dof = static_cast<double>(n - 2);
  return {first.mean, second.mean, std::sqrt(first.rss / dof),
          std::sqrt(second.rss / dof)};
}

double chain_statistic(const SegmentStats& stats) {
  const double diff = std::abs(stats.mean1 - stats.mean2);
  const double spread = std::max(stats.sd1, stats.sd2);
  if (spread == 0.0) {
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return diff / spread;
}

double hot_start_statistic(const std::vector<std::vector<double>>& histories,
                           std::size_t t, const HotStartConfig& config) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (t < std::max<std::size_t>(config.min_iters, 9) || histories.empty()) {
    return kInf;
  }
  std::vector<double> u;
  u.reserve(histories.size());
  for (const auto& trace : histories) {
    if (trace.size() < t) {
      throw InvalidArgument("chain history shorter than t");
    }
    u.push_back(chain_statistic(segment_stats(std::span(trace).first(t))));
  }
  std::sort(u.begin(), u.end());
  const std::size_t k = u.size();
  return k % 2 == 1 ? u[k / 2] : 0.5 * (u[k / 2 - 1] + u[k / 2]);
}

bool hot_start_test(const std::vector<std::vector<double>>& histories,
                    std::size_t t, const HotStartConfig& config) {
  return hot_start_statistic(histories, t, config) < config.threshold;
}

}  // namespace cmcmc

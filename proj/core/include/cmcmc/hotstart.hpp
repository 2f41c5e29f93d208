#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cmcmc {

struct HotStartConfig {
  double threshold = 0.5;
  std::size_t min_iters = 9;

  bool operator==(const HotStartConfig&) const = default;
};

/// Means and detrended residual sds of the two trailing segments of a
/// log-potential trace.
struct SegmentStats {
  double mean1 = 0.0;
  double mean2 = 0.0;
  double sd1 = 0.0;
  double sd2 = 0.0;
};

/// With n = ceil(t/3): segment 1 is iterations n+1..2n and segment 2 is
/// 2n+1..t (1-based). Each mean is over the segment's own points; each sd
/// is sqrt(RSS / (n - 2)) of an OLS line fitted against the iteration index.
/// Throws NotReady for t < 9.
SegmentStats segment_stats(std::span<const double> trace);

/// u = |mean1 - mean2| / max(sd1, sd2) with 0/0 = 0 and x/0 = +inf.
double chain_statistic(const SegmentStats& stats);

/// Median over chains of u_k using the first t entries of each trace.
/// Returns +inf when t < min_iters.
double hot_start_statistic(const std::vector<std::vector<double>>& histories,
                           std::size_t t, const HotStartConfig& config = {});

bool hot_start_test(const std::vector<std::vector<double>>& histories,
                    std::size_t t, const HotStartConfig& config = {});

}  // namespace cmcmc

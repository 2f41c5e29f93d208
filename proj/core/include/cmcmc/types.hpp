#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cmcmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Coreset weights, one per selected datum. Nonnegative after every
/// optimizer step.
using Weights = Eigen::VectorXd;

enum class DataKind { regression, classification, counts, pairwise, location };

std::string_view to_string(DataKind kind);
DataKind parse_data_kind(std::string_view name);

struct Pair {
  int home = 0;
  int visitor = 0;
  bool operator==(const Pair&) const = default;
};

/// N observations. Row n of `features` is x_n; `responses[n]` is y_n (empty
/// for the location kind); `pairs[n]` holds team ids for the pairwise kind.
struct Dataset {
  DataKind kind = DataKind::location;
  Matrix features;
  Vector responses;
  std::vector<Pair> pairs;
  int num_teams = 0;

  std::size_t size() const;
  std::size_t width() const { return static_cast<std::size_t>(features.cols()); }

  /// Throws InvalidArgument when an invariant is broken (empty data, bad
  /// labels, negative counts, team id out of range).
  void validate() const;
};

struct CoresetSelection {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
};

/// K chain states plus the log-potential trace of each chain.
struct ChainEnsemble {
  std::vector<Vector> states;
  std::vector<std::vector<double>> potential_history;

  explicit ChainEnsemble(std::vector<Vector> initial);

  std::size_t num_chains() const { return states.size(); }
  std::size_t history_length() const;
  void record(std::span<const double> potentials);
};

/// Independent generator for stream `stream` of a run seeded with `seed`.
/// Streams are stable across platforms that share the std::mt19937_64
/// definition.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace cmcmc

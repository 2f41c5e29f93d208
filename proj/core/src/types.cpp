#include "cmcmc/types.hpp"

#include <cmath>
#include <string>

#include "cmcmc/errors.hpp"

namespace cmcmc {

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::regression:
      return "regression";
    case DataKind::classification:
      return "classification";
    case DataKind::counts:
      return "counts";
    case DataKind::pairwise:
      return "pairwise";
    case DataKind::location:
      return "location";
  }
  return "unknown";
}

DataKind parse_data_kind(std::string_view name) {
  for (auto kind : {DataKind::regression, DataKind::classification,
                    DataKind::counts, DataKind::pairwise, DataKind::location}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidArgument("unknown data kind: " + std::string(name));
}

std::size_t Dataset::size() const {
  if (kind == DataKind::pairwise) return pairs.size();
  return static_cast<std::size_t>(features.rows());
}

void Dataset::validate() const {
  const auto n = size();
  if (n == 0) throw InvalidArgument("dataset is empty");
  if (kind == DataKind::pairwise) {
    if (static_cast<std::size_t>(responses.size()) != n) {
      throw InvalidArgument("pairwise dataset needs one outcome per game");
    }
    if (num_teams < 1) throw InvalidArgument("pairwise dataset has no teams");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = pairs[i];
      if (p.home < 0 || p.home >= num_teams || p.visitor < 0 ||
          p.visitor >= num_teams) {
        throw InvalidArgument("team id out of range at row " +
                              std::to_string(i));
      }
      if (responses[i] != 0.0 && responses[i] != 1.0) {
        throw InvalidArgument("pairwise outcome must be 0 or 1");
      }
    }
    return;
  }
  if (!features.allFinite()) throw InvalidArgument("non-finite feature value");
  if (kind == DataKind::location) return;
  if (static_cast<std::size_t>(responses.size()) != n) {
    throw InvalidArgument("response length does not match feature rows");
  }
  for (Eigen::Index i = 0; i < responses.size(); ++i) {
    const double y = responses[i];
    if (!std::isfinite(y)) throw InvalidArgument("non-finite response");
    if (kind == DataKind::classification && y != 0.0 && y != 1.0) {
      throw InvalidArgument("binary response must be 0 or 1");
    }
    if (kind == DataKind::counts && (y < 0.0 || y != std::floor(y))) {
      throw InvalidArgument("count response must be a nonnegative integer");
    }
  }
}

ChainEnsemble::ChainEnsemble(std::vector<Vector> initial)
    : states(std::move(initial)), potential_history(states.size()) {
  if (states.size() < 2) {
    throw InvalidArgument("a chain ensemble needs K >= 2 chains");
  }
}

std::size_t ChainEnsemble::history_length() const {
  return potential_history.empty() ? 0 : potential_history.front().size();
}

void ChainEnsemble::record(std::span<const double> potentials) {
  if (potentials.size() != states.size()) {
    throw InvalidArgument("one potential per chain expected");
  }
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    potential_history[k].push_back(potentials[k]);
  }
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x636d636du};
  return Rng(seq);
}

}  // namespace cmcmc

namespace cmcmc {

std::string_view error_kind(const std::exception& e) noexcept {
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical_error";
  if (dynamic_cast<const NotReady*>(&e)) return "not_ready";
  if (dynamic_cast<const UnsupportedModel*>(&e)) return "unsupported_model";
  if (dynamic_cast<const ContractViolation*>(&e)) return "contract_violation";
  if (dynamic_cast<const InvalidReference*>(&e)) return "invalid_reference";
  if (dynamic_cast<const ReferenceFailure*>(&e)) return "reference_failure";
  if (dynamic_cast<const IoError*>(&e)) return "io_error";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

}  // namespace cmcmc

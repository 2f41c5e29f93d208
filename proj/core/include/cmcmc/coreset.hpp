#pragma once

#include <cstddef>

#include "cmcmc/models.hpp"
#include "cmcmc/types.hpp"

namespace cmcmc {

/// Uniform sample of M distinct indices. With `balance` (classification
/// data only): all positives plus uniform negatives when M > 2 * #positives,
/// otherwise ceil(M/2) positives and floor(M/2) negatives.
CoresetSelection select_coreset(const Dataset& data, std::size_t M,
                                bool balance, Rng& rng);

/// w_m = N / M for every m.
Weights init_weights(std::size_t N, std::size_t M);

/// Σ_m w_m ℓ_{indices[m]}(theta). Throws NumericalError on a NaN term.
double log_potential(const Weights& w, const Vector& theta, const Model& model,
                     const CoresetSelection& selection);

}  // namespace cmcmc

#pragma once

#include <cstddef>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/sequential/bounds.hpp"
#include "estim/training_set.hpp"

namespace estim::seq {

/// Uniformly chosen floor(fraction * |outside|) indices of records whose
/// target lies outside `bounds` in at least one coordinate, ascending.
std::vector<std::size_t> replay_select(const TrainingSet& prev, const ParamBounds& bounds,
                                       double fraction, RngStream& rng);

}  // namespace estim::seq

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "estim/core_math/tensor.hpp"

namespace estim {

/// Paired (theta, x) simulation records. Row n of `inputs` was simulated at
/// row n of `targets`. Provenance vectors have one entry per record.
struct TrainingSet {
  Tensor inputs;   // N x data shape
  Tensor targets;  // N x P, transformed scale
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> origin_iteration;
  std::vector<std::uint8_t> replayed;

  std::size_t size() const { return targets.empty() ? 0 : targets.dim(0); }
  void validate() const;
};

/// Rows of `set` selected by `indices`, in the given order.
TrainingSet select_records(const TrainingSet& set, std::span<const std::size_t> indices);

/// Concatenation of two record sets with identical data and target shapes.
TrainingSet merge_records(const TrainingSet& a, const TrainingSet& b);

}  // namespace estim

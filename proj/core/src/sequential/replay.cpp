#include "estim/sequential/replay.hpp"

#include <algorithm>

#include "estim/error.hpp"

namespace estim::seq {

std::vector<std::size_t> replay_select(const TrainingSet& prev, const ParamBounds& bounds,
                                       double fraction, RngStream& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(Errc::InvalidArgument, "replay fraction must lie in [0, 1]");
  }
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (!bounds.contains(prev.targets.row(i))) outside.push_back(i);
  }
  const auto k = static_cast<std::size_t>(fraction * static_cast<double>(outside.size()) + 1e-9);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(outside.size() - i);
    std::swap(outside[i], outside[j]);
  }
  outside.resize(k);
  std::sort(outside.begin(), outside.end());
  return outside;
}

}  // namespace estim::seq

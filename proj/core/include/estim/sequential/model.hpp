#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/tensor.hpp"

namespace estim::seq {

/// Draws one network-ready dataset from a fixed parameter value.
using Sampler = std::function<Tensor(RngStream&)>;

/// A simulator seen through the transformed parameter scale: every theta
/// handed to a Model is a point on the scale the network is trained on.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t param_dim() const = 0;
  virtual std::vector<std::string> param_names() const = 0;
  /// Shape of one network input.
  virtual std::vector<std::size_t> data_shape() const = 0;

  /// Throws SimulatorDomainError when theta maps outside the simulator's
  /// parameter space.
  virtual void check_domain(std::span<const double> theta) const = 0;

  /// Raw simulated data at theta.
  virtual Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const = 0;
  /// Map from raw data to network input; identity unless overridden.
  virtual Tensor featurize(const Tensor& raw) const { return raw; }

  Tensor simulate(std::span<const double> theta, RngStream& rng) const {
    return featurize(simulate_raw(theta, rng));
  }

  /// Sampler at a fixed theta. Models with expensive per-parameter set-up
  /// override this to cache it across bootstrap draws.
  virtual Sampler bind(std::span<const double> theta) const;
};

}  // namespace estim::seq

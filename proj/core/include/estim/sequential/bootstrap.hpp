#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/tensor.hpp"
#include "estim/neural/network.hpp"
#include "estim/sequential/model.hpp"

namespace estim::seq {

/// Network outputs for B datasets simulated at theta_hat, and their summary.
/// Spread statistics (sd, interval half-widths about the median) are
/// multiplied by `rescale`; bias is theta_hat - median.
struct BootstrapSummary {
  Tensor samples;  // B x P
  std::vector<double> theta_hat;
  std::vector<double> median;
  std::vector<double> sd;
  std::vector<double> bias;
  std::vector<double> lo;
  std::vector<double> hi;
  double alpha_lo = 0.025;
  double alpha_hi = 0.975;
  double rescale = 1.0;

  std::size_t B() const { return samples.empty() ? 0 : samples.dim(0); }
  std::size_t P() const { return theta_hat.size(); }

  friend bool operator==(const BootstrapSummary&, const BootstrapSummary&) = default;
};

/// Summary statistics of stored samples. Throws EmptySample when B < 2.
BootstrapSummary summarize_bootstrap(std::span<const double> theta_hat, Tensor samples,
                                     double alpha_lo = 0.025, double alpha_hi = 0.975,
                                     double rescale = 1.0);

/// Network estimate for one observed dataset; x0 must have the network's
/// input shape.
std::vector<double> estimate(const nn::TrainedNetwork& net, const Tensor& x0);

/// Estimator applied to one dataset.
using Estimator = std::function<std::vector<double>(const Tensor&)>;

/// Generic bootstrap: replicate b draws from sampler with rng.derive(b) and
/// is pushed through the estimator. Replicates run in parallel and the
/// result does not depend on the thread count.
BootstrapSummary bootstrap_with(const Estimator& estimator, const Sampler& sampler,
                                std::span<const double> theta_hat, std::size_t B,
                                const RngStream& rng, double rescale = 1.0,
                                double alpha_lo = 0.025, double alpha_hi = 0.975);

/// Bootstrap of a network estimator at theta_hat. Throws
/// SimulatorDomainError when theta_hat is outside the model's domain.
BootstrapSummary bootstrap_uncertainty(const nn::TrainedNetwork& net, const Model& model,
                                       std::span<const double> theta_hat, std::size_t B,
                                       const RngStream& rng);

/// Simulate one record per theta row; row n uses rng.derive(n).
Tensor simulate_rows(const Model& model, const Tensor& thetas, const RngStream& rng);

}  // namespace estim::seq

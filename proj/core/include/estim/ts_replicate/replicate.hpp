#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/tensor.hpp"
#include "estim/sequential/bootstrap.hpp"

namespace estim::ts {

/// How an observed length T is matched to the training length T_k.
/// For T <= T_k: m copies plus a remainder block of length r starting at
/// `offset`. For T > T_k: `chunks` pieces of length T_k, the last one
/// possibly short and itself replicated.
struct ReplicationPlan {
  std::size_t T = 0;
  std::size_t T_k = 0;
  std::size_t m = 0;
  std::size_t r = 0;
  std::size_t offset = 0;
  std::size_t chunks = 0;

  friend bool operator==(const ReplicationPlan&, const ReplicationPlan&) = default;
};

struct Replicated {
  Tensor series;  // length T_k
  ReplicationPlan plan;
};

/// m = floor(T_k / T) copies of x0 followed by x0[offset, offset + r) with
/// r = T_k mod T and offset uniform on {0, ..., T - r}. Throws LengthError
/// when T > T_k.
Replicated replicate(const Tensor& x0, std::size_t T_k, RngStream& rng);

/// Point estimator for a series of exactly the training length.
using SeriesEstimator = std::function<std::vector<double>(const Tensor&)>;

enum class Combine { Mean, Median };

struct LongEstimate {
  std::vector<double> combined;
  std::vector<std::vector<double>> chunk_estimates;
  ReplicationPlan plan;
};

/// Splits x0 (T > T_k) into consecutive length-T_k chunks, replicates a
/// short final chunk, and combines the chunk estimates coordinate-wise.
LongEstimate estimate_long(const Tensor& x0, const SeriesEstimator& estimator, std::size_t T_k,
                           RngStream& rng, Combine combine = Combine::Mean);

double rescale_sd(double sd, std::size_t m);

/// sqrt(T_k / T) for T < T_k (sqrt(m) when T divides T_k), else 1.
double rescale_factor(std::size_t T, std::size_t T_k);

struct SeriesSimulator {
  // Throws SimulatorDomainError for parameters the simulator rejects.
  std::function<void(std::span<const double>)> check_domain;
  std::function<Tensor(std::span<const double>, std::size_t, RngStream&)> simulate;
};

/// Length at which bootstrap series are drawn when T < T_k. ObservedLength
/// simulates length T and replicates each draw like x0 before estimating.
enum class TsBootstrap { TrainingLength, ObservedLength };

struct TsEstimate {
  std::vector<double> theta_hat;
  seq::BootstrapSummary summary;
  ReplicationPlan plan;
};

/// Point estimate for any length plus bootstrap uncertainty.
///
/// T <= T_k: the estimate uses the replicated series. The bootstrap draws
/// B series of the training length at theta_hat, estimates them directly,
/// and scales the spread by rescale_factor(T, T_k).
/// T > T_k: the estimate is estimate_long; bootstrap series have length T
/// and go through the same chunked path, factor 1.
///
/// rng.derive(0) drives the remainder offsets for x0, rng.derive(1) the
/// bootstrap (replicate b uses rng.derive(1).derive(b)).
TsEstimate estimate_any(const Tensor& x0, const SeriesEstimator& estimator, std::size_t T_k,
                        const SeriesSimulator& simulator, std::size_t B, const RngStream& rng,
                        Combine combine = Combine::Mean,
                        TsBootstrap mode = TsBootstrap::TrainingLength);

/// Conditional least-squares (conditional Gaussian MLE) of an AR(1)
/// coefficient: sum x(t) x(t-1) / sum x(t-1)^2.
double ar1_mle(std::span<const double> x);

}  // namespace estim::ts

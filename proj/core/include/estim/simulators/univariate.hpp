#pragma once

#include <cstddef>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/tensor.hpp"

namespace estim::sim {

/// J i.i.d. draws from N(mu, exp(log_var)).
Tensor sim_gaussian_iid(double mu, double log_var, std::size_t J, RngStream& rng);

/// Stationary AR(1) with unit innovations: x(1) ~ N(0, 1 / (1 - rho^2)),
/// x(t) = rho x(t-1) + e(t). Throws NonStationary when |rho| >= 1.
Tensor sim_ar1(double rho, std::size_t T, RngStream& rng);

struct SvolParams {
  double rho = 0.8;
  double nu = 6.0;
  double sigma = 0.1;
};

void validate(const SvolParams& p);

struct SvolPath {
  Tensor h;  // latent log-variance
  Tensor x;  // observations
};

/// Stochastic volatility: h(t) = rho h(t-1) + xi(t), xi ~ N(0, sigma^2),
/// stationary start, and x(t) = exp(h(t) / 2) e(t) where e is Student-t with
/// nu degrees of freedom rescaled to unit variance.
///
/// With `scaled` set, h is divided by its stationary sd
/// sigma / sqrt(1 - rho^2) before it enters x, and x is divided by
/// exp(1/4) = sqrt(E exp(h)), so both have unit variance and sigma drops out.
SvolPath sim_svol_path(const SvolParams& p, std::size_t T, RngStream& rng, bool scaled = true);
Tensor sim_svol(const SvolParams& p, std::size_t T, RngStream& rng, bool scaled = true);

}  // namespace estim::sim

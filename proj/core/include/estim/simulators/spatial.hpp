#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/tensor.hpp"

namespace estim::sim {

/// Regular nx-by-ny lattice. Site (ix, iy) has index iy * nx + ix and
/// coordinates (ix * spacing, iy * spacing). Fields are returned with shape
/// {ny, nx}.
struct Grid2D {
  std::size_t nx = 16;
  std::size_t ny = 16;
  double spacing = 1.0;

  std::size_t sites() const { return nx * ny; }
  double distance(std::size_t a, std::size_t b) const;
  double diameter() const;
  void validate() const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Powered-exponential correlation C(h) = exp(-(h / alpha)^eta).
struct PowExpParams {
  double alpha = 1.0;
  double eta = 1.0;
};

double powexp_correlation(const PowExpParams& p, double h);

/// Exact Gaussian-process sampler; the Cholesky factor of the site
/// covariance is computed once at construction.
class GaussianProcessSampler {
 public:
  GaussianProcessSampler(const Grid2D& grid, const PowExpParams& params);
  Tensor sample(RngStream& rng) const;

 private:
  Grid2D grid_;
  Tensor lower_;
};

Tensor sim_gp(const Grid2D& grid, const PowExpParams& params, RngStream& rng);

/// Semivariogram gamma(h) = (h / lambda)^nu of the Brown-Resnick field.
struct BrownResnickParams {
  double lambda = 6.2;
  double nu = 1.0;

  void validate() const;
};

struct BrownResnickOptions {
  std::size_t max_sites = 64 * 64;
  // Cap on spectral-function proposals per realisation, as a multiple of the
  // number of sites. Hitting it truncates the construction and flags bias.
  std::size_t draw_budget_per_site = 200;
};

struct BrownResnickDiagnostics {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  bool budget_hit = false;
};

/// Exact Brown-Resnick simulation with unit-Frechet margins by the
/// extremal-functions construction. The Gaussian increment field is drawn
/// relative to site 0 from one Cholesky factor, cached per parameter value.
class BrownResnickSimulator {
 public:
  BrownResnickSimulator(const BrownResnickParams& params, const Grid2D& grid,
                        const BrownResnickOptions& options = {});

  Tensor sample(RngStream& rng, BrownResnickDiagnostics* diag = nullptr) const;

  const Grid2D& grid() const { return grid_; }
  std::size_t budget_hits() const { return budget_hits_.load(); }

 private:
  BrownResnickParams params_;
  Grid2D grid_;
  BrownResnickOptions options_;
  Tensor lower_;               // Cholesky factor over sites 1..n-1
  std::vector<double> gamma_;  // gamma by lattice offset, index |dy| * nx + |dx|
  mutable std::atomic<std::size_t> budget_hits_{0};
};

Tensor sim_brown_resnick(const BrownResnickParams& params, const Grid2D& grid, RngStream& rng,
                         const BrownResnickOptions& options = {});

struct PowExpFit {
  double alpha = 0.0;
  double eta = 0.0;
  double objective = 0.0;
};

struct EmpiricalVariogram {
  std::vector<double> distance;  // mean pair distance per bin
  std::vector<double> value;     // semivariance per bin
  std::vector<std::size_t> pairs;
};

/// Pooled rank transform of every value in `fields` to standard normal scores.
std::vector<Tensor> gaussianize(std::span<const Tensor> fields);

/// Matheron estimator on bins of width `spacing` centred on multiples of
/// the spacing, up to half the grid diameter, averaged over replicates.
EmpiricalVariogram empirical_variogram(const Grid2D& grid, std::span<const Tensor> fields);

/// Least-squares fit of 1 - C(h) to the empirical semivariogram of the
/// Gaussianized replicates, over alpha in [0.01 * spacing, diameter] and
/// eta in [0.05, 2]. Throws DegenerateField when a replicate is constant.
PowExpFit fit_powexp(const Grid2D& grid, std::span<const Tensor> fields);

}  // namespace estim::sim

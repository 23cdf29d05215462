#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>

#include "estim/core_math/linalg.hpp"
#include "estim/error.hpp"
#include "estim/simulators/spatial.hpp"

namespace estim::sim {

void BrownResnickParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda) || !(nu > 0.0 && nu <= 2.0)) {
    std::ostringstream os;
    os << "Brown-Resnick parameters lambda=" << lambda << ", nu=" << nu
       << " need lambda > 0 and 0 < nu <= 2";
    throw Error(Errc::InvalidArgument, os.str());
  }
}

BrownResnickSimulator::BrownResnickSimulator(const BrownResnickParams& params, const Grid2D& grid,
                                             const BrownResnickOptions& options)
    : params_(params), grid_(grid), options_(options) {
  params.validate();
  grid.validate();
  const std::size_t n = grid.sites();
  if (n > options.max_sites) {
    std::ostringstream os;
    os << "grid " << grid.nx << "x" << grid.ny << " has " << n << " sites, limit is "
       << options.max_sites;
    throw Error(Errc::GridTooLarge, os.str());
  }
  gamma_.resize(n);
  for (std::size_t dy = 0; dy < grid.ny; ++dy) {
    for (std::size_t dx = 0; dx < grid.nx; ++dx) {
      const double h = grid.spacing * std::hypot(static_cast<double>(dx), static_cast<double>(dy));
      gamma_[dy * grid.nx + dx] = std::pow(h / params.lambda, params.nu);
    }
  }
  // Covariance of W(s) - W(s_0) over the remaining sites.
  const std::size_t m = n - 1;
  auto g = [&](std::size_t a, std::size_t b) {
    const std::size_t dx = a % grid.nx > b % grid.nx ? a % grid.nx - b % grid.nx
                                                     : b % grid.nx - a % grid.nx;
    const std::size_t dy = a / grid.nx > b / grid.nx ? a / grid.nx - b / grid.nx
                                                     : b / grid.nx - a / grid.nx;
    return gamma_[dy * grid.nx + dx];
  };
  Tensor cov = Tensor::matrix(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = g(i + 1, 0) + g(j + 1, 0) - g(i + 1, j + 1);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  lower_ = cholesky(cov);
}

Tensor BrownResnickSimulator::sample(RngStream& rng, BrownResnickDiagnostics* diag) const {
  const std::size_t n = grid_.sites();
  const std::size_t m = n - 1;
  const std::size_t nx = grid_.nx;
  const std::size_t budget = options_.draw_budget_per_site * n;
  const double* L = lower_.data();

  auto gam = [&](std::size_t a, std::size_t b) {
    const std::size_t ax = a % nx, bx = b % nx, ay = a / nx, by = b / nx;
    const std::size_t dx = ax > bx ? ax - bx : bx - ax;
    const std::size_t dy = ay > by ? ay - by : by - ay;
    return gamma_[dy * nx + dx];
  };
  // W at site i (i >= 1) is row i-1 of L applied to the first i normals.
  std::vector<double> z(m), w(n, 0.0);
  auto w_at = [&](std::size_t i) {
    if (i == 0) return 0.0;
    const double* row = L + (i - 1) * m;
    double s = 0.0;
    for (std::size_t j = 0; j < i; ++j) s += row[j] * z[j];
    return s;
  };

  // Work on the log scale; variogram values can be large for short ranges.
  std::vector<double> log_z(n, -std::numeric_limits<double>::infinity());
  BrownResnickDiagnostics local;
  for (std::size_t k = 0; k < n && !local.budget_hit; ++k) {
    double e = rng.exponential();
    while (-std::log(e) > log_z[k]) {
      if (local.proposals == budget) {
        local.budget_hit = true;
        break;
      }
      ++local.proposals;
      const double log_zeta = -std::log(e);
      for (std::size_t j = 0; j < k; ++j) z[j] = rng.normal();
      const double wk = w_at(k);
      bool accept = true;
      for (std::size_t i = k; i-- > 0;) {
        w[i] = w_at(i);
        if (log_zeta + w[i] - wk - gam(i, k) >= log_z[i]) {
          accept = false;
          break;
        }
      }
      if (accept) {
        ++local.accepted;
        for (std::size_t j = k; j < m; ++j) z[j] = rng.normal();
        w[k] = wk;
        for (std::size_t i = k + 1; i < n; ++i) w[i] = w_at(i);
        for (std::size_t i = 0; i < n; ++i) {
          const double v = log_zeta + w[i] - wk - gam(i, k);
          if (v > log_z[i]) log_z[i] = v;
        }
      }
      e += rng.exponential();
    }
  }
  if (local.budget_hit) {
    if (budget_hits_.fetch_add(1) == 0) {
      static std::mutex warn_mutex;
      std::lock_guard lock(warn_mutex);
      std::cerr << "warning: Bias: Brown-Resnick draw budget (" << budget
                << " proposals) exhausted at lambda=" << params_.lambda << ", nu=" << params_.nu
                << "; realisation truncated\n";
    }
  }
  if (diag != nullptr) *diag = local;
  Tensor field({grid_.ny, grid_.nx});
  for (std::size_t i = 0; i < n; ++i) field[i] = std::exp(log_z[i]);
  return field;
}

Tensor sim_brown_resnick(const BrownResnickParams& params, const Grid2D& grid, RngStream& rng,
                         const BrownResnickOptions& options) {
  return BrownResnickSimulator(params, grid, options).sample(rng);
}

}  // namespace estim::sim

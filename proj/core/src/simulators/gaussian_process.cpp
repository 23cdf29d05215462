#include <cmath>
#include <sstream>

#include "estim/core_math/linalg.hpp"
#include "estim/error.hpp"
#include "estim/simulators/spatial.hpp"

namespace estim::sim {

double Grid2D::distance(std::size_t a, std::size_t b) const {
  const double dx = static_cast<double>(a % nx) - static_cast<double>(b % nx);
  const double dy = static_cast<double>(a / nx) - static_cast<double>(b / nx);
  return spacing * std::sqrt(dx * dx + dy * dy);
}

double Grid2D::diameter() const {
  const double wx = static_cast<double>(nx - 1);
  const double wy = static_cast<double>(ny - 1);
  return spacing * std::sqrt(wx * wx + wy * wy);
}

void Grid2D::validate() const {
  if (nx < 2 || ny < 2 || !(spacing > 0.0) || !std::isfinite(spacing)) {
    std::ostringstream os;
    os << "grid " << nx << "x" << ny << " with spacing " << spacing
       << " needs nx, ny >= 2 and spacing > 0";
    throw Error(Errc::InvalidArgument, os.str());
  }
}

double powexp_correlation(const PowExpParams& p, double h) {
  if (h == 0.0) return 1.0;
  return std::exp(-std::pow(h / p.alpha, p.eta));
}

GaussianProcessSampler::GaussianProcessSampler(const Grid2D& grid, const PowExpParams& params)
    : grid_(grid) {
  grid.validate();
  if (!(params.alpha > 0.0) || !(params.eta > 0.0 && params.eta <= 2.0)) {
    throw Error(Errc::InvalidArgument, "powered-exponential needs alpha > 0 and eta in (0, 2]");
  }
  const std::size_t n = grid.sites();
  Tensor cov = Tensor::matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = powexp_correlation(params, grid.distance(i, j));
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  lower_ = cholesky(cov);
}

Tensor GaussianProcessSampler::sample(RngStream& rng) const {
  const std::size_t n = grid_.sites();
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  Tensor field({grid_.ny, grid_.nx});
  lower_multiply(lower_, z, field.values());
  return field;
}

Tensor sim_gp(const Grid2D& grid, const PowExpParams& params, RngStream& rng) {
  return GaussianProcessSampler(grid, params).sample(rng);
}

}  // namespace estim::sim

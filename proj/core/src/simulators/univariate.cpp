#include "estim/simulators/univariate.hpp"

#include <cmath>
#include <sstream>

#include "estim/error.hpp"

namespace estim::sim {

namespace {

void require_stationary(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    std::ostringstream os;
    os << "AR coefficient " << rho << " is not inside (-1, 1)";
    throw Error(Errc::NonStationary, os.str());
  }
}

void require_length(std::size_t n, const char* what) {
  if (n == 0) throw Error(Errc::InvalidArgument, std::string(what) + " must be at least 1");
}

}  // namespace

Tensor sim_gaussian_iid(double mu, double log_var, std::size_t J, RngStream& rng) {
  require_length(J, "sample size J");
  if (!std::isfinite(mu) || !std::isfinite(log_var)) {
    throw Error(Errc::InvalidArgument, "gaussian parameters must be finite");
  }
  const double sd = std::exp(0.5 * log_var);
  Tensor x({J});
  for (auto& v : x.values()) v = mu + sd * rng.normal();
  return x;
}

Tensor sim_ar1(double rho, std::size_t T, RngStream& rng) {
  require_stationary(rho);
  require_length(T, "series length T");
  Tensor x({T});
  x[0] = rng.normal() / std::sqrt(1.0 - rho * rho);
  for (std::size_t t = 1; t < T; ++t) x[t] = rho * x[t - 1] + rng.normal();
  return x;
}

void validate(const SvolParams& p) {
  require_stationary(p.rho);
  if (!(p.nu > 2.0)) {
    std::ostringstream os;
    os << "degrees of freedom " << p.nu << " must exceed 2";
    throw Error(Errc::BadDof, os.str());
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw Error(Errc::InvalidArgument, "volatility innovation sd must be positive");
  }
}

SvolPath sim_svol_path(const SvolParams& p, std::size_t T, RngStream& rng, bool scaled) {
  validate(p);
  require_length(T, "series length T");
  const double h_sd = p.sigma / std::sqrt(1.0 - p.rho * p.rho);
  const double t_scale = std::sqrt((p.nu - 2.0) / p.nu);
  SvolPath out{Tensor({T}), Tensor({T})};
  double h = h_sd * rng.normal();
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) h = p.rho * h + p.sigma * rng.normal();
    const double e = t_scale * rng.student_t(p.nu);
    if (scaled) {
      const double hs = h / h_sd;
      out.h[t] = hs;
      out.x[t] = std::exp(0.5 * hs - 0.25) * e;
    } else {
      out.h[t] = h;
      out.x[t] = std::exp(0.5 * h) * e;
    }
  }
  return out;
}

Tensor sim_svol(const SvolParams& p, std::size_t T, RngStream& rng, bool scaled) {
  return sim_svol_path(p, T, rng, scaled).x;
}

}  // namespace estim::sim

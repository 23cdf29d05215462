#include "estim/sequential/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"
#include "estim/sequential/bootstrap.hpp"

namespace estim::seq {

void ParamBounds::validate() const {
  if (lo.size() != hi.size() || lo.empty()) {
    throw Error(Errc::InvalidBounds, "bounds need matching, non-empty lo and hi vectors");
  }
  for (std::size_t p = 0; p < lo.size(); ++p) {
    if (!std::isfinite(lo[p]) || !std::isfinite(hi[p]) || !(lo[p] < hi[p])) {
      std::ostringstream os;
      os << "coordinate " << p << ": (" << lo[p] << ", " << hi[p] << ") is not a valid box";
      throw Error(Errc::InvalidBounds, os.str());
    }
  }
}

bool ParamBounds::contains(std::span<const double> theta) const {
  for (std::size_t p = 0; p < lo.size(); ++p) {
    if (theta[p] < lo[p] || theta[p] > hi[p]) return false;
  }
  return true;
}

Tensor sample_prior(const ParamBounds& bounds, std::size_t N, RngStream& rng) {
  bounds.validate();
  const std::size_t P = bounds.size();
  Tensor theta = Tensor::matrix(N, P);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t p = 0; p < P; ++p) theta(n, p) = rng.uniform(bounds.lo[p], bounds.hi[p]);
  }
  return theta;
}

Tensor sample_prior(const ParamBounds& bounds, std::size_t N, RngStream& rng,
                    const std::function<bool(std::span<const double>)>& accept) {
  bounds.validate();
  const std::size_t P = bounds.size();
  Tensor theta = Tensor::matrix(N, P);
  std::vector<double> row(P);
  std::size_t tries = 0;
  for (std::size_t n = 0; n < N;) {
    if (++tries > 1000 * std::max<std::size_t>(N, 1)) {
      throw Error(Errc::InvalidBounds, "box holds almost no admissible parameter values");
    }
    for (std::size_t p = 0; p < P; ++p) row[p] = rng.uniform(bounds.lo[p], bounds.hi[p]);
    if (!accept(row)) continue;
    for (std::size_t p = 0; p < P; ++p) theta(n, p) = row[p];
    ++n;
  }
  return theta;
}

std::string to_string(BoundsRule rule) {
  return rule == BoundsRule::Basic ? "basic" : "literal";
}

BoundsRule bounds_rule_from_string(const std::string& name) {
  if (name == "basic") return BoundsRule::Basic;
  if (name == "literal") return BoundsRule::Literal;
  throw Error(Errc::ConfigError, "bounds rule must be 'basic' or 'literal', got '" + name + "'");
}

BoundsUpdate update_bounds(std::span<const double> theta_hat, const BootstrapSummary& summary,
                           BoundsRule rule, double eps) {
  const std::size_t B = summary.B();
  const std::size_t P = summary.P();
  if (B < 2) throw Error(Errc::EmptySample, "bound update needs at least two bootstrap samples");
  if (theta_hat.size() != P) throw Error(Errc::ShapeMismatch, "theta_hat length differs from P");

  BoundsUpdate out;
  out.bounds.lo.resize(P);
  out.bounds.hi.resize(P);
  out.widened.assign(P, false);
  std::vector<double> d(B);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t b = 0; b < B; ++b) d[b] = theta_hat[p] - summary.samples(b, p);
    std::sort(d.begin(), d.end());
    const double bias = summary.bias[p];
    const double centre = theta_hat[p] + bias;
    double a1 = 0.0, a2 = 0.0;
    if (rule == BoundsRule::Basic) {
      double q_lo = quantile_sorted(d, summary.alpha_lo);
      double q_hi = quantile_sorted(d, summary.alpha_hi);
      if (summary.rescale != 1.0) {
        const double mid = quantile_sorted(d, 0.5);
        q_lo = mid + summary.rescale * (q_lo - mid);
        q_hi = mid + summary.rescale * (q_hi - mid);
      }
      a1 = theta_hat[p] + q_lo;
      a2 = theta_hat[p] + q_hi;
    } else {
      a1 = theta_hat[p] + bias - quantile_sorted(d, 0.05);
      a2 = theta_hat[p] + bias + quantile_sorted(d, 0.975);
    }
    if (d.front() == d.back()) out.degenerate = true;
    if (!(a1 < a2) || centre < a1 || centre > a2) {
      const double half = 0.5 * std::max(2.0 * summary.sd[p], eps);
      a1 = centre - half;
      a2 = centre + half;
      out.widened[p] = true;
    }
    out.bounds.lo[p] = a1;
    out.bounds.hi[p] = a2;
  }
  return out;
}

StopDecision stop_check(const BootstrapSummary& summary, double gamma) {
  StopDecision out;
  out.stop = true;
  for (std::size_t p = 0; p < summary.P(); ++p) {
    const bool ok = std::abs(summary.bias[p]) <= gamma * summary.sd[p];
    out.within.push_back(ok);
    out.stop = out.stop && ok;
  }
  return out;
}

}  // namespace estim::seq

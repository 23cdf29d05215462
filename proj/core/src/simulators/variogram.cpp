#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "estim/error.hpp"
#include "estim/simulators/spatial.hpp"

namespace estim::sim {

namespace {

void check_fields(const Grid2D& grid, std::span<const Tensor> fields) {
  if (fields.empty()) throw Error(Errc::EmptySample, "variogram fit needs at least one field");
  for (std::size_t r = 0; r < fields.size(); ++r) {
    if (fields[r].size() != grid.sites()) {
      throw Error(Errc::ShapeMismatch, "field " + std::to_string(r) + " does not match the grid");
    }
    if (!fields[r].all_finite()) {
      throw Error(Errc::InvalidArgument, "field " + std::to_string(r) + " has non-finite values");
    }
    const auto v = fields[r].values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo == *hi) {
      throw Error(Errc::DegenerateField, "field " + std::to_string(r) + " is constant");
    }
  }
}

}  // namespace

std::vector<Tensor> gaussianize(std::span<const Tensor> fields) {
  std::size_t total = 0;
  for (const auto& f : fields) total += f.size();
  if (total == 0) throw Error(Errc::EmptySample, "nothing to gaussianize");
  std::vector<std::pair<double, std::size_t>> pooled;
  pooled.reserve(total);
  for (const auto& f : fields) {
    for (double v : f.values()) pooled.emplace_back(v, pooled.size());
  }
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> scores(total);
  const boost::math::normal_distribution<double> normal;
  const double n = static_cast<double>(total);
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    // Ties share their average rank.
    const double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    const double z = boost::math::quantile(normal, (rank - 0.5) / n);
    for (std::size_t k = i; k < j; ++k) scores[pooled[k].second] = z;
    i = j;
  }
  std::vector<Tensor> out;
  std::size_t offset = 0;
  for (const auto& f : fields) {
    Tensor g(f.shape());
    std::copy_n(scores.begin() + static_cast<std::ptrdiff_t>(offset), f.size(), g.data());
    offset += f.size();
    out.push_back(std::move(g));
  }
  return out;
}

EmpiricalVariogram empirical_variogram(const Grid2D& grid, std::span<const Tensor> fields) {
  grid.validate();
  const double hmax = 0.5 * grid.diameter();
  const auto nx = static_cast<long>(grid.nx);
  const auto ny = static_cast<long>(grid.ny);
  const auto nbins = static_cast<std::size_t>(std::floor(hmax / grid.spacing + 0.5)) + 1;
  std::vector<double> sum(nbins, 0.0), dist(nbins, 0.0);
  std::vector<std::size_t> count(nbins, 0);
  for (long dy = 0; dy < ny; ++dy) {
    for (long dx = -(nx - 1); dx < nx; ++dx) {
      if (dy == 0 && dx <= 0) continue;
      const double h = grid.spacing * std::hypot(static_cast<double>(dx), static_cast<double>(dy));
      if (h > hmax) continue;
      const auto bin = static_cast<std::size_t>(std::floor(h / grid.spacing + 0.5));
      const long x0 = std::max(0L, -dx), x1 = std::min(nx, nx - dx);
      std::size_t pairs = 0;
      double acc = 0.0;
      for (const auto& f : fields) {
        const double* v = f.data();
        for (long y = 0; y + dy < ny; ++y) {
          const double* a = v + y * nx;
          const double* b = v + (y + dy) * nx + dx;
          for (long x = x0; x < x1; ++x) {
            const double d = a[x] - b[x];
            acc += 0.5 * d * d;
          }
          pairs += static_cast<std::size_t>(x1 - x0);
        }
      }
      sum[bin] += acc;
      dist[bin] += h * static_cast<double>(pairs);
      count[bin] += pairs;
    }
  }
  EmpiricalVariogram vg;
  for (std::size_t b = 0; b < nbins; ++b) {
    if (count[b] == 0) continue;
    const double c = static_cast<double>(count[b]);
    vg.distance.push_back(dist[b] / c);
    vg.value.push_back(sum[b] / c);
    vg.pairs.push_back(count[b]);
  }
  return vg;
}

namespace {

double objective(const EmpiricalVariogram& vg, double alpha, double eta) {
  double s = 0.0;
  for (std::size_t k = 0; k < vg.distance.size(); ++k) {
    const double model = 1.0 - std::exp(-std::pow(vg.distance[k] / alpha, eta));
    const double r = vg.value[k] - model;
    s += r * r;
  }
  return s;
}

}  // namespace

PowExpFit fit_powexp(const Grid2D& grid, std::span<const Tensor> fields) {
  grid.validate();
  check_fields(grid, fields);
  const auto scores = gaussianize(fields);
  const auto vg = empirical_variogram(grid, scores);
  if (vg.distance.size() < 2) {
    throw Error(Errc::InvalidArgument, "variogram fit needs at least two distinct distances");
  }
  const double log_lo = std::log(0.01 * grid.spacing);
  const double log_hi = std::log(grid.diameter());
  constexpr double eta_lo = 0.05, eta_hi = 2.0;

  PowExpFit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  double best_la = log_lo, best_eta = eta_hi;
  constexpr int alpha_steps = 80;
  for (int i = 0; i <= alpha_steps; ++i) {
    const double la = log_lo + (log_hi - log_lo) * i / alpha_steps;
    for (int j = 1; j <= 40; ++j) {
      const double eta = 0.05 * j;
      const double f = objective(vg, std::exp(la), eta);
      if (f < best.objective) {
        best.objective = f;
        best_la = la;
        best_eta = eta;
      }
    }
  }
  // Compass search from the best grid point.
  double step_a = (log_hi - log_lo) / alpha_steps, step_e = 0.05;
  while (step_a > 1e-7 || step_e > 1e-7) {
    bool moved = false;
    const double cand[4][2] = {{best_la + step_a, best_eta},
                               {best_la - step_a, best_eta},
                               {best_la, best_eta + step_e},
                               {best_la, best_eta - step_e}};
    for (const auto& c : cand) {
      const double la = std::clamp(c[0], log_lo, log_hi);
      const double eta = std::clamp(c[1], eta_lo, eta_hi);
      const double f = objective(vg, std::exp(la), eta);
      if (f < best.objective) {
        best.objective = f;
        best_la = la;
        best_eta = eta;
        moved = true;
      }
    }
    if (!moved) {
      step_a *= 0.5;
      step_e *= 0.5;
    }
  }
  best.alpha = std::exp(best_la);
  best.eta = best_eta;
  return best;
}

}  // namespace estim::sim

#include "estim/ts_replicate/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "estim/core_math/parallel.hpp"
#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"

namespace estim::ts {

namespace {

void require_series(const Tensor& x, const char* what) {
  if (x.rank() != 1 || x.empty()) {
    throw Error(Errc::ShapeMismatch, std::string(what) + " must be a non-empty rank-1 series");
  }
}

std::vector<double> combine_rows(const std::vector<std::vector<double>>& rows, Combine how) {
  const std::size_t P = rows.front().size();
  std::vector<double> out(P);
  std::vector<double> col(rows.size());
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][p];
    out[p] = how == Combine::Mean ? mean(col) : median(col);
  }
  return out;
}

}  // namespace

Replicated replicate(const Tensor& x0, std::size_t T_k, RngStream& rng) {
  require_series(x0, "observed series");
  const std::size_t T = x0.size();
  if (T_k == 0 || T > T_k) {
    std::ostringstream os;
    os << "series of length " << T << " cannot be replicated to training length " << T_k
       << " (use the chunked estimator)";
    throw Error(Errc::LengthError, os.str());
  }
  ReplicationPlan plan{T, T_k, T_k / T, T_k % T, 0, 1};
  if (plan.r > 0) plan.offset = rng.uniform_index(T - plan.r + 1);
  Tensor out({T_k});
  double* dst = out.data();
  for (std::size_t k = 0; k < plan.m; ++k) dst = std::copy_n(x0.data(), T, dst);
  std::copy_n(x0.data() + plan.offset, plan.r, dst);
  return {std::move(out), plan};
}

LongEstimate estimate_long(const Tensor& x0, const SeriesEstimator& estimator, std::size_t T_k,
                           RngStream& rng, Combine combine) {
  require_series(x0, "observed series");
  const std::size_t T = x0.size();
  if (T_k == 0 || T <= T_k) {
    throw Error(Errc::LengthError, "chunked estimation needs T > T_k");
  }
  LongEstimate out;
  const std::size_t full = T / T_k;
  const std::size_t tail = T % T_k;
  out.plan = {T, T_k, 0, 0, 0, full + (tail > 0 ? 1 : 0)};
  for (std::size_t c = 0; c < full; ++c) {
    Tensor chunk({T_k}, std::vector<double>(x0.data() + c * T_k, x0.data() + (c + 1) * T_k));
    out.chunk_estimates.push_back(estimator(chunk));
  }
  if (tail > 0) {
    Tensor piece({tail}, std::vector<double>(x0.data() + full * T_k, x0.data() + T));
    auto rep = replicate(piece, T_k, rng);
    out.plan.m = rep.plan.m;
    out.plan.r = rep.plan.r;
    out.plan.offset = rep.plan.offset;
    out.chunk_estimates.push_back(estimator(rep.series));
  }
  out.combined = combine_rows(out.chunk_estimates, combine);
  return out;
}

double rescale_sd(double sd, std::size_t m) {
  if (m == 0) throw Error(Errc::InvalidArgument, "block count must be >= 1");
  return sd * std::sqrt(static_cast<double>(m));
}

double rescale_factor(std::size_t T, std::size_t T_k) {
  if (T == 0 || T >= T_k) return 1.0;
  return std::sqrt(static_cast<double>(T_k) / static_cast<double>(T));
}

TsEstimate estimate_any(const Tensor& x0, const SeriesEstimator& estimator, std::size_t T_k,
                        const SeriesSimulator& simulator, std::size_t B, const RngStream& rng,
                        Combine combine, TsBootstrap mode) {
  require_series(x0, "observed series");
  const std::size_t T = x0.size();
  TsEstimate out;
  RngStream obs_rng = rng.derive(0);
  if (T <= T_k) {
    auto rep = replicate(x0, T_k, obs_rng);
    out.plan = rep.plan;
    out.theta_hat = estimator(rep.series);
  } else {
    auto est = estimate_long(x0, estimator, T_k, obs_rng, combine);
    out.plan = est.plan;
    out.theta_hat = std::move(est.combined);
  }
  if (simulator.check_domain) simulator.check_domain(out.theta_hat);
  if (B < 2) throw Error(Errc::EmptySample, "bootstrap needs B >= 2");

  const std::size_t P = out.theta_hat.size();
  const RngStream boot = rng.derive(1);
  Tensor samples = Tensor::matrix(B, P);
  const bool long_path = T > T_k;
  parallel_for(B, [&](std::size_t b) {
    RngStream r = boot.derive(b);
    std::vector<double> e;
    if (long_path) {
      const Tensor x = simulator.simulate(out.theta_hat, T, r);
      e = estimate_long(x, estimator, T_k, r, combine).combined;
    } else if (mode == TsBootstrap::ObservedLength) {
      const Tensor x = simulator.simulate(out.theta_hat, T, r);
      e = estimator(replicate(x, T_k, r).series);
    } else {
      e = estimator(simulator.simulate(out.theta_hat, T_k, r));
    }
    if (e.size() != P) throw Error(Errc::ShapeMismatch, "estimator output length changed");
    std::copy(e.begin(), e.end(), samples.row(b).begin());
  });
  out.summary = seq::summarize_bootstrap(out.theta_hat, std::move(samples), 0.025, 0.975,
                                         rescale_factor(T, T_k));
  return out;
}

double ar1_mle(std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::EmptySample, "AR(1) estimate needs at least two values");
  double num = 0.0, den = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    num += x[t] * x[t - 1];
    den += x[t - 1] * x[t - 1];
  }
  if (den == 0.0) throw Error(Errc::DegenerateInput, "AR(1) estimate of an all-zero series");
  return num / den;
}

}  // namespace estim::ts

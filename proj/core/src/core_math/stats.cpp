#include "estim/core_math/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "estim/error.hpp"

namespace estim {

namespace {

void require_nonempty(std::span<const double> s, const char* what) {
  if (s.empty()) throw Error(Errc::EmptySample, std::string(what) + ": empty sample");
}

std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double alpha) {
  require_nonempty(sorted, "quantile");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "quantile level " << alpha << " outside [0, 1]";
    throw Error(Errc::InvalidArgument, os.str());
  }
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * alpha;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> samples, double alpha) {
  require_nonempty(samples, "quantile");
  const auto v = sorted_copy(samples);
  return quantile_sorted(v, alpha);
}

double mean(std::span<const double> samples) {
  require_nonempty(samples, "mean");
  double s = 0.0;
  for (double v : samples) s += v;
  return s / static_cast<double>(samples.size());
}

double median(std::span<const double> samples) { return quantile(samples, 0.5); }

double sample_sd(std::span<const double> samples) {
  require_nonempty(samples, "sample_sd");
  if (samples.size() < 2) return 0.0;
  const double m = mean(samples);
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(samples.size() - 1));
}

double SampleSummary::quantile(double alpha) const {
  auto it = quantiles.find(alpha);
  if (it == quantiles.end()) throw Error(Errc::InvalidArgument, "quantile level not summarised");
  return it->second;
}

SampleSummary summarize(std::span<const double> samples, std::span<const double> alphas) {
  require_nonempty(samples, "summarize");
  const auto v = sorted_copy(samples);
  SampleSummary out;
  out.median = quantile_sorted(v, 0.5);
  out.sd = sample_sd(samples);
  out.min = v.front();
  out.max = v.back();
  for (double a : alphas) out.quantiles[a] = quantile_sorted(v, a);
  return out;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series converges poorly; survival is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require_nonempty(samples, "ks_test");
  const auto v = sorted_copy(samples);
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
  }
  // Stephens (1970) small-sample correction of the asymptotic distribution.
  const double sn = std::sqrt(n);
  return {d, kolmogorov_survival(d * (sn + 0.12 + 0.11 / sn))};
}

double sample_variance(std::span<const double> x) {
  const double sd = sample_sd(x);
  return sd * sd;
}

double lag1_autocorrelation(std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::EmptySample, "lag1_autocorrelation needs two values");
  const double m = mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    den += (x[t] - m) * (x[t] - m);
    if (t > 0) num += (x[t] - m) * (x[t - 1] - m);
  }
  return num / den;
}

double excess_kurtosis(std::span<const double> x) {
  const double m = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::ShapeMismatch, "correlation needs equal-length samples of size >= 2");
  }
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace estim

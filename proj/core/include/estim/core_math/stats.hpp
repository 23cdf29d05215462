#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

namespace estim {

/// Linear-interpolation quantile on h = (n - 1) * alpha of the sorted sample
/// (Hyndman & Fan type 7). Throws EmptySample on empty input.
double quantile(std::span<const double> samples, double alpha);
double quantile_sorted(std::span<const double> sorted, double alpha);

double mean(std::span<const double> samples);
double median(std::span<const double> samples);
/// Sample standard deviation with denominator n - 1 (0 for n == 1).
double sample_sd(std::span<const double> samples);

struct SampleSummary {
  double median = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::map<double, double> quantiles;

  double quantile(double alpha) const;
};

SampleSummary summarize(std::span<const double> samples, std::span<const double> alphas);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

/// P(K > x) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double x);

double lag1_autocorrelation(std::span<const double> x);
double sample_variance(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);
double correlation(std::span<const double> x, std::span<const double> y);

}  // namespace estim

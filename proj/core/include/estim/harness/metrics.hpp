#pragma once

#include <span>
#include <string>
#include <vector>

#include "estim/core_math/tensor.hpp"

namespace estim::harness {

struct Metric {
  double bias = 0.0;
  double sd = 0.0;    // sample sd, denominator I - 1
  double rmse = 0.0;  // sqrt(mean squared error)
  friend bool operator==(const Metric&, const Metric&) = default;
};

/// Per-coordinate bias, sd and RMSE of an I x P estimate matrix against the
/// truth. Throws DegenerateInput when I < 2.
std::vector<Metric> metrics(const Tensor& estimates, std::span<const double> truth);

/// One line of a metric table: a stage (iteration number, "last", or an
/// observed length), a parameter and the estimate kind it summarises.
struct MetricRow {
  std::string stage;
  std::string parameter;
  std::string estimate;  // "fitted" or "median"
  std::size_t n = 0;
  Metric value;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

/// One replicate's estimate of one parameter at one stage.
struct EstimateRow {
  std::size_t replicate = 0;
  std::string stage;
  bool final = false;
  std::string parameter;
  double truth = 0.0;
  double fitted = 0.0;
  double median = 0.0;  // bootstrap median
  double sd = 0.0;      // bootstrap sd
  double lo = 0.0;      // bootstrap interval
  double hi = 0.0;

  friend bool operator==(const EstimateRow&, const EstimateRow&) = default;
};

/// Metrics per stage (in order of first appearance), parameter, and
/// estimate kind, plus a "last" stage over the rows flagged final. Groups
/// with fewer than two replicates are left out.
std::vector<MetricRow> metric_table(const std::vector<EstimateRow>& rows);

}  // namespace estim::harness

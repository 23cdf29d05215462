#include "estim/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "estim/error.hpp"

namespace estim::harness {

std::vector<Metric> metrics(const Tensor& estimates, std::span<const double> truth) {
  if (estimates.rank() != 2 || estimates.dim(1) != truth.size()) {
    throw Error(Errc::ShapeMismatch, "estimates must be I x P with P matching the truth");
  }
  const std::size_t I = estimates.dim(0);
  if (I < 2) throw Error(Errc::DegenerateInput, "metrics need at least two estimates");
  std::vector<Metric> out(truth.size());
  for (std::size_t p = 0; p < truth.size(); ++p) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
      mean += estimates(i, p);
      sq += (estimates(i, p) - truth[p]) * (estimates(i, p) - truth[p]);
    }
    mean /= static_cast<double>(I);
    double ss = 0.0;
    for (std::size_t i = 0; i < I; ++i) ss += (estimates(i, p) - mean) * (estimates(i, p) - mean);
    out[p].bias = mean - truth[p];
    out[p].sd = std::sqrt(ss / static_cast<double>(I - 1));
    out[p].rmse = std::sqrt(sq / static_cast<double>(I));
  }
  return out;
}

}  // namespace estim::harness

namespace estim::harness {

namespace {

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

void tabulate(const std::string& stage, const std::vector<const EstimateRow*>& rows,
              const std::vector<std::string>& params, std::vector<MetricRow>& out) {
  for (const auto& param : params) {
    std::vector<const EstimateRow*> sel;
    for (const auto* r : rows) {
      if (r->parameter == param) sel.push_back(r);
    }
    if (sel.size() < 2) continue;
    for (const char* kind : {"fitted", "median"}) {
      Tensor est = Tensor::matrix(sel.size(), 1);
      for (std::size_t i = 0; i < sel.size(); ++i) {
        est(i, 0) = std::string(kind) == "fitted" ? sel[i]->fitted : sel[i]->median;
      }
      const double truth = sel[0]->truth;
      out.push_back({stage, param, kind, sel.size(), metrics(est, std::span(&truth, 1))[0]});
    }
  }
}

}  // namespace

std::vector<MetricRow> metric_table(const std::vector<EstimateRow>& rows) {
  std::vector<std::string> stages, params;
  for (const auto& r : rows) {
    push_unique(stages, r.stage);
    push_unique(params, r.parameter);
  }
  std::vector<MetricRow> out;
  for (const auto& stage : stages) {
    std::vector<const EstimateRow*> sel;
    for (const auto& r : rows) {
      if (r.stage == stage) sel.push_back(&r);
    }
    tabulate(stage, sel, params, out);
  }
  std::vector<const EstimateRow*> last;
  for (const auto& r : rows) {
    if (r.final) last.push_back(&r);
  }
  if (!last.empty()) tabulate("last", last, params, out);
  return out;
}

}  // namespace estim::harness

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "estim/harness/metrics.hpp"
#include "estim/harness/results_io.hpp"

namespace estim::harness {

/// Tidy plot row; `iteration` holds the stage label.
struct PlotRow {
  std::size_t replicate = 0;
  std::string iteration;
  std::string parameter;
  std::string role;  // train | bootstrap | fitted | truth | lo | hi
  std::string value;
};

/// Per stage and parameter: every training target, every bootstrap sample,
/// the fitted value and the truth.
std::vector<PlotRow> boxplot_rows(const std::vector<EstimateRow>& estimates, const CsvTable& training,
                                  const CsvTable& bootstrap);
/// Fitted value and truth at each replicate's last iteration (every stage
/// for time-series runs).
std::vector<PlotRow> scatter_rows(const std::vector<EstimateRow>& estimates);
/// Bootstrap interval ends, fitted value and truth for every stage.
std::vector<PlotRow> interval_rows(const std::vector<EstimateRow>& estimates);

std::string plot_csv(const std::string& config_hash, const std::vector<PlotRow>& rows);

/// Reads a result directory and writes plot_boxplot.csv, plot_scatter.csv
/// and plot_intervals.csv next to it. Throws IoError.
void emit_plotdata(const std::filesystem::path& dir);

}  // namespace estim::harness

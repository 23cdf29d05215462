#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "estim/harness/metrics.hpp"
#include "estim/harness/runner.hpp"

namespace estim::harness {

/// Writes config.json, trace.ndjson, timings.ndjson, estimates.csv,
/// metrics.csv, replicates.csv and (unless `samples` is off) training.csv
/// and bootstrap.csv into `dir`, plus network.json when the run trained a
/// shared network. Every CSV opens with a "# config_hash: <hash>" line.
/// Throws IoError.
void write_bundle(const ResultBundle& bundle, const std::filesystem::path& dir, bool samples = true);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string metrics_csv(const std::string& config_hash, const std::vector<MetricRow>& rows);
std::string estimates_csv(const std::string& config_hash, const std::vector<EstimateRow>& rows);

/// A parsed CSV result file: the config hash from the leading comment, the
/// header and the data rows as text.
struct CsvTable {
  std::string config_hash;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
std::vector<EstimateRow> read_estimates(const std::filesystem::path& path);

/// Reads config.json written by write_bundle (or a bare config object).
ExperimentConfig read_config(const std::filesystem::path& path);

}  // namespace estim::harness

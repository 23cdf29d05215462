#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "estim/core_math/tensor.hpp"

namespace estim::sim {

struct DatasetMeta {
  std::string model;
  std::vector<std::pair<std::string, double>> params;
  std::uint64_t seed = 0;
  std::vector<std::size_t> shape;  // per-replicate data shape
};

/// One row per replicate: replicate index, seed, the parameter values, then
/// the flattened data x0..x{n-1}. A leading comment line records the model
/// name and data shape.
void write_dataset_csv(const std::filesystem::path& path, const DatasetMeta& meta,
                       const std::vector<Tensor>& replicates);

struct Dataset {
  DatasetMeta meta;
  std::vector<Tensor> replicates;
};

Dataset read_dataset_csv(const std::filesystem::path& path);

/// Single-column numeric CSV; a non-numeric first line is taken as a header.
Tensor read_series_csv(const std::filesystem::path& path);

}  // namespace estim::sim

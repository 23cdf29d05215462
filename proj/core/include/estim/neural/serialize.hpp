#pragma once

#include <filesystem>
#include <string>

#include "estim/neural/network.hpp"

namespace estim::nn {

/// JSON document holding the spec, training config, loss history and
/// weights as numeric arrays printed with 17 significant digits, so a
/// round trip reproduces every weight bit for bit.
std::string to_json(const TrainedNetwork& net);
TrainedNetwork from_json(const std::string& text);

void save(const TrainedNetwork& net, const std::filesystem::path& path);
TrainedNetwork load(const std::filesystem::path& path);

}  // namespace estim::nn

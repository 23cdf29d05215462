#pragma once

#include "estim/neural/network.hpp"
#include "json.hpp"

namespace estim::nn {

nlohmann::json network_spec_to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

}  // namespace estim::nn

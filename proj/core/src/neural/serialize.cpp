#include "estim/neural/serialize.hpp"

#include <fstream>
#include <sstream>

#include "estim/error.hpp"
#include "spec_json.hpp"

namespace estim::nn {

using nlohmann::json;

namespace {

json spec_to_json(const NetworkSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers) {
    json j{{"kind", to_string(l.kind)}};
    switch (l.kind) {
      case LayerKind::Dense: j["units"] = l.units; break;
      case LayerKind::Conv1d:
        j["filters"] = l.units;
        j["kernel"] = l.kernel_w;
        break;
      case LayerKind::Conv2d:
        j["filters"] = l.units;
        j["kernel"] = {l.kernel_h, l.kernel_w};
        break;
      default: break;
    }
    layers.push_back(j);
  }
  return {{"input_shape", spec.input_shape}, {"layers", layers}, {"output_dim", spec.output_dim}};
}

}  // namespace

json network_spec_to_json(const NetworkSpec& spec) { return spec_to_json(spec); }

NetworkSpec network_spec_from_json(const json& j) {
  NetworkSpec spec;
  spec.input_shape = j.at("input_shape").get<std::vector<std::size_t>>();
  spec.output_dim = j.at("output_dim").get<std::size_t>();
  for (const auto& lj : j.at("layers")) {
    LayerSpec l;
    l.kind = layer_kind_from_string(lj.at("kind").get<std::string>());
    switch (l.kind) {
      case LayerKind::Dense: l.units = lj.at("units").get<std::size_t>(); break;
      case LayerKind::Conv1d:
        l.units = lj.at("filters").get<std::size_t>();
        l.kernel_h = 1;
        l.kernel_w = lj.at("kernel").get<std::size_t>();
        break;
      case LayerKind::Conv2d: {
        l.units = lj.at("filters").get<std::size_t>();
        const auto& k = lj.at("kernel");
        if (k.is_array()) {
          l.kernel_h = k.at(0).get<std::size_t>();
          l.kernel_w = k.at(1).get<std::size_t>();
        } else {
          l.kernel_h = l.kernel_w = k.get<std::size_t>();
        }
        break;
      }
      default: break;
    }
    spec.layers.push_back(l);
  }
  return spec;
}

std::string to_json(const TrainedNetwork& net) {
  json weights = json::array();
  for (const auto& w : net.weights) {
    weights.push_back({{"shape", w.shape()}, {"values", w.storage()}});
  }
  const auto& c = net.config;
  json doc{{"format", "estim-network/1"},
           {"spec", spec_to_json(net.spec)},
           {"train_config",
            {{"learning_rate", c.learning_rate},
             {"epochs", c.epochs},
             {"batch_size", c.batch_size},
             {"beta1", c.beta1},
             {"beta2", c.beta2},
             {"epsilon", c.epsilon},
             {"seed", c.seed}}},
           {"loss_history", net.loss_history},
           {"weights", weights}};
  // nlohmann prints doubles with max_digits10, which round-trips exactly.
  return doc.dump(1);
}

TrainedNetwork from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, std::string("network JSON does not parse: ") + e.what());
  }
  try {
    TrainedNetwork net;
    net.spec = network_spec_from_json(doc.at("spec"));
    const auto& c = doc.at("train_config");
    net.config.learning_rate = c.at("learning_rate").get<double>();
    net.config.epochs = c.at("epochs").get<std::size_t>();
    net.config.batch_size = c.at("batch_size").get<std::size_t>();
    net.config.beta1 = c.at("beta1").get<double>();
    net.config.beta2 = c.at("beta2").get<double>();
    net.config.epsilon = c.at("epsilon").get<double>();
    net.config.seed = c.at("seed").get<std::uint64_t>();
    net.loss_history = doc.at("loss_history").get<std::vector<double>>();
    for (const auto& wj : doc.at("weights")) {
      net.weights.emplace_back(wj.at("shape").get<std::vector<std::size_t>>(),
                               wj.at("values").get<std::vector<double>>());
    }
    const auto expected = parameter_shapes(net.spec);
    if (expected.size() != net.weights.size()) {
      throw Error(Errc::ShapeMismatch, "weight tensor count does not match the spec");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (expected[i] != net.weights[i].shape()) {
        throw Error(Errc::ShapeMismatch, "weight tensor " + std::to_string(i) + " has wrong shape");
      }
    }
    return net;
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, std::string("malformed network JSON: ") + e.what());
  }
}

void save(const TrainedNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << to_json(net) << '\n';
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

TrainedNetwork load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace estim::nn

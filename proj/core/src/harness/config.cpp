#include "estim/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "../neural/spec_json.hpp"
#include "estim/error.hpp"
#include "estim/transforms/transforms.hpp"
#include "json.hpp"

namespace estim::harness {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

std::vector<nn::LayerSpec> mlp_layers(std::size_t hidden) {
  return {nn::LayerSpec::dense(hidden), nn::LayerSpec::relu()};
}

std::vector<nn::LayerSpec> cnn_layers(bool two_d, std::vector<std::size_t> filters,
                                      std::size_t kernel, std::size_t dense_units) {
  std::vector<nn::LayerSpec> out;
  for (std::size_t f : filters) {
    out.push_back(two_d ? nn::LayerSpec::conv2d(f, kernel, kernel) : nn::LayerSpec::conv1d(f, kernel));
    out.push_back(nn::LayerSpec::relu());
  }
  out.push_back(nn::LayerSpec::flatten());
  out.push_back(nn::LayerSpec::dense(dense_units));
  out.push_back(nn::LayerSpec::relu());
  return out;
}

struct Scale {
  std::size_t smoke, small, paper;
  std::size_t pick(const std::string& s) const {
    return s == "smoke" ? smoke : s == "paper" ? paper : small;
  }
};

std::set<std::string> truth_keys(const std::string& preset) {
  if (preset == "gauss-var" || preset == "gauss-meanvar" || preset == "gauss-moments") {
    return {"mu", "sigma2"};
  }
  if (preset == "brown-resnick") return {"lambda", "nu"};
  if (preset == "svol") return {"rho", "nu", "sigma"};
  return {"rho"};
}

std::size_t param_count(const std::string& preset) {
  if (preset == "gauss-var" || preset == "ar1-replication") return 1;
  return 2;
}

const json& at(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) config_error("missing key '" + where + key + "'");
  return *it;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error("'" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) config_error("unknown key '" + where + it.key() + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  const json& v = at(j, key, where);
  const std::string name = where + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) config_error("'" + name + "' must be true or false");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) config_error("'" + name + "' must be a string");
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) config_error("'" + name + "' must be a number");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_unsigned()) config_error("'" + name + "' must be a non-negative integer");
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      config_error("'" + name + "' must be an array of numbers");
    }
  } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
    if (!v.is_array() ||
        !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_unsigned(); })) {
      config_error("'" + name + "' must be an array of non-negative integers");
    }
  } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
      config_error("'" + name + "' must be an array of strings");
    }
  }
  return v.get<T>();
}

json to_json_value(const ExperimentConfig& c) {
  nn::NetworkSpec holder;
  holder.layers = c.layers;
  json layers = nn::network_spec_to_json(holder).at("layers");
  return json{
      {"preset", c.preset},
      {"scale", c.scale},
      {"seed", c.seed},
      {"replicates", c.replicates},
      {"model",
       {{"truth", c.truth},
        {"transforms", c.transforms},
        {"J", c.J},
        {"grid", c.grid},
        {"spacing", c.spacing},
        {"T_k", c.T_k},
        {"lengths", c.lengths},
        {"svol_scaled", c.svol_scaled},
        {"estimator", c.estimator},
        {"ts_bootstrap", c.ts_bootstrap},
        {"sort_inputs", c.sort_inputs},
        {"observed_csv", c.observed_csv}}},
      {"sequential",
       {{"N", c.N},
        {"B", c.B},
        {"gamma", c.gamma},
        {"max_iterations", c.max_iterations},
        {"growth", c.growth},
        {"growth_rate", c.growth_rate},
        {"replay", c.replay},
        {"replay_fraction", c.replay_fraction},
        {"bounds_rule", c.bounds_rule},
        {"bounds_lo", c.bounds_lo},
        {"bounds_hi", c.bounds_hi},
        {"init_offset", c.init_offset},
        {"warm_start", c.warm_start}}},
      {"network", {{"layers", layers}}},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"epsilon", c.train.epsilon}}},
  };
}

ExperimentConfig from_json_value(const json& j) {
  check_keys(j, {"preset", "scale", "seed", "replicates", "model", "sequential", "network", "train"}, "");
  ExperimentConfig c;
  c.preset = get<std::string>(j, "preset", "");
  c.scale = get<std::string>(j, "scale", "");
  c.seed = get<std::uint64_t>(j, "seed", "");
  c.replicates = get<std::size_t>(j, "replicates", "");

  const json& m = at(j, "model", "");
  const std::string mw = "model.";
  check_keys(m, {"truth", "transforms", "J", "grid", "spacing", "T_k", "lengths", "svol_scaled",
                 "estimator", "ts_bootstrap", "sort_inputs", "observed_csv"},
             mw);
  const json& truth = at(m, "truth", mw);
  if (!truth.is_object()) config_error("'model.truth' must be an object");
  for (auto it = truth.begin(); it != truth.end(); ++it) {
    if (!it->is_number()) config_error("'model.truth." + it.key() + "' must be a number");
    c.truth[it.key()] = it->get<double>();
  }
  c.transforms = get<std::vector<std::string>>(m, "transforms", mw);
  c.J = get<std::size_t>(m, "J", mw);
  c.grid = get<std::size_t>(m, "grid", mw);
  c.spacing = get<double>(m, "spacing", mw);
  c.T_k = get<std::size_t>(m, "T_k", mw);
  c.lengths = get<std::vector<std::size_t>>(m, "lengths", mw);
  c.svol_scaled = get<bool>(m, "svol_scaled", mw);
  c.estimator = get<std::string>(m, "estimator", mw);
  c.ts_bootstrap = get<std::string>(m, "ts_bootstrap", mw);
  c.sort_inputs = get<bool>(m, "sort_inputs", mw);
  c.observed_csv = get<std::string>(m, "observed_csv", mw);

  const json& s = at(j, "sequential", "");
  const std::string sw = "sequential.";
  check_keys(s, {"N", "B", "gamma", "max_iterations", "growth", "growth_rate", "replay",
                 "replay_fraction", "bounds_rule", "bounds_lo", "bounds_hi", "init_offset",
                 "warm_start"},
             sw);
  c.N = get<std::size_t>(s, "N", sw);
  c.B = get<std::size_t>(s, "B", sw);
  c.gamma = get<double>(s, "gamma", sw);
  c.max_iterations = get<std::size_t>(s, "max_iterations", sw);
  c.growth = get<bool>(s, "growth", sw);
  c.growth_rate = get<double>(s, "growth_rate", sw);
  c.replay = get<bool>(s, "replay", sw);
  c.replay_fraction = get<double>(s, "replay_fraction", sw);
  c.bounds_rule = get<std::string>(s, "bounds_rule", sw);
  c.bounds_lo = get<std::vector<double>>(s, "bounds_lo", sw);
  c.bounds_hi = get<std::vector<double>>(s, "bounds_hi", sw);
  c.init_offset = get<double>(s, "init_offset", sw);
  c.warm_start = get<bool>(s, "warm_start", sw);

  const json& n = at(j, "network", "");
  check_keys(n, {"layers"}, "network.");
  try {
    json holder{{"input_shape", json::array()}, {"output_dim", 0}, {"layers", at(n, "layers", "network.")}};
    c.layers = nn::network_spec_from_json(holder).layers;
  } catch (const json::exception& e) {
    config_error(std::string("malformed 'network.layers': ") + e.what());
  } catch (const Error& e) {
    config_error("malformed 'network.layers': " + e.detail());
  }

  const json& t = at(j, "train", "");
  const std::string tw = "train.";
  check_keys(t, {"learning_rate", "epochs", "batch_size", "beta1", "beta2", "epsilon"}, tw);
  c.train.learning_rate = get<double>(t, "learning_rate", tw);
  c.train.epochs = get<std::size_t>(t, "epochs", tw);
  c.train.batch_size = get<std::size_t>(t, "batch_size", tw);
  c.train.beta1 = get<double>(t, "beta1", tw);
  c.train.beta2 = get<double>(t, "beta2", tw);
  c.train.epsilon = get<double>(t, "epsilon", tw);
  return c;
}

bool known_transform(const std::string& id, const std::vector<std::string>& allowed) {
  return std::find(allowed.begin(), allowed.end(), id) != allowed.end();
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"gauss-var", "gauss-meanvar", "gauss-moments",
                                            "brown-resnick", "svol", "ar1-replication"};
  return ids;
}

ExperimentConfig preset_config(const std::string& preset, const std::string& scale) {
  const auto& ids = preset_ids();
  if (std::find(ids.begin(), ids.end(), preset) == ids.end()) {
    config_error("unknown preset '" + preset + "'");
  }
  if (scale != "smoke" && scale != "small" && scale != "paper") {
    config_error("scale must be smoke, small or paper, got '" + scale + "'");
  }
  ExperimentConfig c;
  c.preset = preset;
  c.scale = scale;
  c.train.learning_rate = 0.01;
  c.train.epochs = scale == "smoke" ? 5 : 30;
  c.train.batch_size = 100;

  if (preset == "gauss-var" || preset == "gauss-meanvar" || preset == "gauss-moments") {
    c.truth = {{"mu", 1.0}, {"sigma2", std::exp(1.0)}};
    c.transforms = preset == "gauss-var" ? std::vector<std::string>{"log"}
                                         : std::vector<std::string>{"identity", "log"};
    c.J = 20;
    c.replicates = Scale{2, 20, 100}.pick(scale);
    c.N = Scale{200, 2000, 10000}.pick(scale);
    c.B = Scale{100, 2000, 10000}.pick(scale);
    c.max_iterations = scale == "smoke" ? 3 : 20;
    c.layers = mlp_layers(50);
  } else if (preset == "brown-resnick") {
    c.truth = {{"lambda", 6.2}, {"nu", 1.0}};
    c.transforms = {"log", "logit2"};
    c.grid = Scale{8, 16, 30}.pick(scale);
    c.replicates = Scale{2, 20, 100}.pick(scale);
    c.N = Scale{100, 1500, 6000}.pick(scale);
    c.B = Scale{50, 500, 2000}.pick(scale);
    c.max_iterations = Scale{2, 10, 20}.pick(scale);
    c.replay = true;
    c.layers = cnn_layers(true, {16, 8}, 3, 4);
  } else if (preset == "svol") {
    c.truth = {{"rho", 0.8}, {"nu", 6.0}, {"sigma", 0.1}};
    c.transforms = {"fisher", "log-shift-2"};
    c.T_k = Scale{200, 1000, 5000}.pick(scale);
    c.lengths = scale == "smoke"   ? std::vector<std::size_t>{100, 200, 300}
                : scale == "small" ? std::vector<std::size_t>{250, 500, 1000}
                                   : std::vector<std::size_t>{500, 1000, 2000, 3000, 4000, 5000};
    c.replicates = Scale{2, 10, 30}.pick(scale);
    c.N = Scale{200, 2000, 10000}.pick(scale);
    c.B = Scale{50, 1000, 10000}.pick(scale);
    c.layers = cnn_layers(false, {4, 4, 4}, 3, 4);
  } else {
    c.truth = {{"rho", 0.9}};
    c.transforms = {"identity"};
    c.estimator = "mle";
    c.T_k = Scale{250, 1000, 1000}.pick(scale);
    c.lengths = {Scale{50, 200, 200}.pick(scale)};
    c.replicates = Scale{4, 200, 200}.pick(scale);
    c.N = Scale{200, 2000, 10000}.pick(scale);
    c.B = Scale{100, 1000, 2000}.pick(scale);
    c.layers = cnn_layers(false, {4, 4, 4}, 3, 4);
  }
  return c;
}

std::string to_json(const ExperimentConfig& cfg) { return to_json_value(cfg).dump(2); }

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json_value(j);
}

const std::map<std::string, std::string>& override_aliases() {
  static const std::map<std::string, std::string> aliases{
      {"seed", "seed"},
      {"replicates", "replicates"},
      {"I", "replicates"},
      {"J", "model.J"},
      {"grid", "model.grid"},
      {"spacing", "model.spacing"},
      {"T_k", "model.T_k"},
      {"T", "model.lengths"},
      {"lengths", "model.lengths"},
      {"transforms", "model.transforms"},
      {"estimator", "model.estimator"},
      {"ts-bootstrap", "model.ts_bootstrap"},
      {"sort-inputs", "model.sort_inputs"},
      {"observed", "model.observed_csv"},
      {"N", "sequential.N"},
      {"B", "sequential.B"},
      {"gamma", "sequential.gamma"},
      {"max-iter", "sequential.max_iterations"},
      {"growth", "sequential.growth"},
      {"growth-rate", "sequential.growth_rate"},
      {"replay", "sequential.replay"},
      {"replay-fraction", "sequential.replay_fraction"},
      {"bounds-rule", "sequential.bounds_rule"},
      {"bounds-lo", "sequential.bounds_lo"},
      {"bounds-hi", "sequential.bounds_hi"},
      {"init-offset", "sequential.init_offset"},
      {"warm-start", "sequential.warm_start"},
      {"lr", "train.learning_rate"},
      {"epochs", "train.epochs"},
      {"batch", "train.batch_size"},
  };
  return aliases;
}

ExperimentConfig apply_overrides(const ExperimentConfig& cfg,
                                 const std::vector<std::string>& assignments) {
  json doc = to_json_value(cfg);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) config_error("override '" + a + "' is not key=value");
    std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    if (auto it = override_aliases().find(key); it != override_aliases().end()) key = it->second;

    json* node = &doc;
    std::string parent;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      const bool last = dot == std::string::npos;
      const bool truth_map = parent == "model.truth";
      if (!node->is_object() || (!node->contains(part) && !(last && truth_map))) {
        config_error("unknown config key '" + a.substr(0, eq) + "'");
      }
      node = &(*node)[part];
      if (last) break;
      parent += (parent.empty() ? "" : ".") + part;
      start = dot + 1;
    }
    json value;
    try {
      value = json::parse(text);
    } catch (const json::exception&) {
      value = text;
    }
    // a scalar given for a list-valued field becomes a one-element list
    if (node->is_array() && !value.is_array()) value = json::array({value});
    *node = value;
  }
  return from_json_value(doc);
}

void validate(const ExperimentConfig& c) {
  const auto& ids = preset_ids();
  if (std::find(ids.begin(), ids.end(), c.preset) == ids.end()) {
    config_error("unknown preset '" + c.preset + "'");
  }
  if (c.scale != "smoke" && c.scale != "small" && c.scale != "paper") {
    config_error("scale must be smoke, small or paper");
  }
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) config_error(std::string(name) + " must be positive");
  };
  positive(c.replicates, "replicates");
  positive(c.max_iterations, "sequential.max_iterations");
  positive(c.train.epochs, "train.epochs");
  positive(c.train.batch_size, "train.batch_size");
  if (c.N < 2) config_error("sequential.N must be at least 2");
  if (c.B < 2) config_error("sequential.B must be at least 2");
  if (c.J < 2) config_error("model.J must be at least 2");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) config_error("sequential.gamma must lie in (0, 1)");
  if (!(c.growth_rate >= 0.0)) config_error("sequential.growth_rate must be non-negative");
  if (!(c.replay_fraction >= 0.0 && c.replay_fraction <= 1.0)) {
    config_error("sequential.replay_fraction must lie in [0, 1]");
  }
  if (c.bounds_rule != "basic" && c.bounds_rule != "literal") {
    config_error("sequential.bounds_rule must be basic or literal");
  }
  if (!(c.init_offset > 0.0)) config_error("sequential.init_offset must be positive");
  if (!(c.train.learning_rate > 0.0)) config_error("train.learning_rate must be positive");
  if (!(c.spacing > 0.0)) config_error("model.spacing must be positive");
  if (c.ts_bootstrap != "training-length" && c.ts_bootstrap != "observed-length") {
    config_error("model.ts_bootstrap must be training-length or observed-length");
  }

  const std::size_t P = param_count(c.preset);
  if (c.transforms.size() != P) {
    config_error("model.transforms needs " + std::to_string(P) + " entries for " + c.preset);
  }
  std::vector<std::vector<std::string>> allowed;
  if (c.preset == "gauss-var") allowed = {{"log"}};
  if (c.preset == "gauss-meanvar" || c.preset == "gauss-moments") allowed = {{"identity"}, {"log", "identity"}};
  if (c.preset == "brown-resnick") allowed = {{"log"}, {"logit2"}};
  if (c.preset == "svol") allowed = {{"fisher"}, {"log-shift-2"}};
  if (c.preset == "ar1-replication") allowed = {{"identity", "fisher"}};
  for (std::size_t p = 0; p < P; ++p) {
    if (!known_transform(c.transforms[p], allowed[p])) {
      config_error("transform '" + c.transforms[p] + "' is not available for output " +
                   std::to_string(p) + " of " + c.preset);
    }
  }

  if (!c.bounds_lo.empty() || !c.bounds_hi.empty()) {
    if (c.bounds_lo.size() != P || c.bounds_hi.size() != P) {
      config_error("sequential.bounds_lo/bounds_hi need " + std::to_string(P) + " entries each");
    }
    for (std::size_t p = 0; p < P; ++p) {
      if (!(c.bounds_lo[p] < c.bounds_hi[p])) config_error("initial bounds need lo < hi");
    }
  }

  const auto keys = truth_keys(c.preset);
  for (const auto& k : keys) {
    if (!c.truth.count(k)) config_error("model.truth." + k + " is required for " + c.preset);
  }
  for (const auto& [k, v] : c.truth) {
    if (!keys.count(k)) config_error("model.truth." + k + " is not a parameter of " + c.preset);
    if (!std::isfinite(v)) config_error("model.truth." + k + " must be finite");
  }
  auto t = [&](const char* k) { return c.truth.at(k); };
  if (keys.count("sigma2") && !(t("sigma2") > 0.0)) config_error("model.truth.sigma2 must be positive");
  if (c.preset == "brown-resnick") {
    if (!(t("lambda") > 0.0)) config_error("model.truth.lambda must be positive");
    if (!(t("nu") > 0.0 && t("nu") < 2.0)) config_error("model.truth.nu must lie in (0, 2)");
    if (c.grid < 5) config_error("model.grid must be at least 5");
  }
  if (c.preset == "svol" || c.preset == "ar1-replication") {
    if (!(std::abs(t("rho")) < 1.0)) config_error("model.truth.rho must lie in (-1, 1)");
    if (c.T_k < 8) config_error("model.T_k must be at least 8");
    if (c.lengths.empty()) config_error("model.lengths must not be empty");
    for (std::size_t T : c.lengths) {
      if (T < 2) config_error("model.lengths entries must be at least 2");
    }
  }
  if (c.preset == "svol") {
    if (!(t("nu") > 2.0)) config_error("model.truth.nu must exceed 2");
    if (!(t("sigma") > 0.0)) config_error("model.truth.sigma must be positive");
  }
  if (!c.observed_csv.empty() && c.replicates != 1) {
    config_error("model.observed_csv estimates one dataset; set replicates=1");
  }
  if (c.estimator != "network" && !(c.estimator == "mle" && c.preset == "ar1-replication")) {
    config_error("model.estimator must be network (or mle for ar1-replication)");
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json_value(cfg).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace estim::harness

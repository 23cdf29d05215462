#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "estim/neural/network.hpp"

namespace estim::harness {

/// Every knob of an experiment. Presets fill in defaults and `--set`
/// overrides address fields by dotted JSON path or short alias.
struct ExperimentConfig {
  std::string preset;
  std::string scale = "small";
  std::uint64_t seed = 1;
  std::size_t replicates = 20;

  // model
  std::map<std::string, double> truth;  // raw-scale parameter values
  std::vector<std::string> transforms;  // one transform id per network output
  std::size_t J = 20;                   // i.i.d. sample size
  std::size_t grid = 16;                // grid side for brown-resnick
  double spacing = 1.0;
  std::size_t T_k = 1000;               // training length for time series
  std::vector<std::size_t> lengths;     // observed lengths for time series
  bool svol_scaled = true;
  std::string estimator = "network";    // "network" or "mle" (ar1-replication)
  std::string ts_bootstrap = "training-length";
  bool sort_inputs = true;
  std::string observed_csv;             // estimate this data instead of simulated replicates

  // sequential procedure
  std::size_t N = 2000;
  std::size_t B = 2000;
  double gamma = 0.3;
  std::size_t max_iterations = 20;
  bool growth = true;
  double growth_rate = 0.05;
  bool replay = false;
  double replay_fraction = 0.4;
  std::string bounds_rule = "basic";
  std::vector<double> bounds_lo;        // transformed scale; empty = preset default
  std::vector<double> bounds_hi;
  double init_offset = 2.0;             // half-width of data-driven or truth-centred boxes
  bool warm_start = false;

  // network: hidden stack; a dense output layer of width P is appended
  std::vector<nn::LayerSpec> layers;
  nn::TrainConfig train;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

const std::vector<std::string>& preset_ids();

/// Preset defaults at scale "smoke", "small" or "paper". Throws ConfigError
/// for an unknown preset or scale.
ExperimentConfig preset_config(const std::string& preset, const std::string& scale = "small");

std::string to_json(const ExperimentConfig& cfg);
/// Strict parse: unknown or missing keys and ill-typed values raise
/// ConfigError.
ExperimentConfig config_from_json(const std::string& text);

/// Apply "key=value" overrides. Keys are dotted JSON paths
/// ("sequential.N", "model.truth.rho") or aliases listed by
/// override_aliases(). Values are parsed as JSON when possible and taken as
/// strings otherwise. Throws ConfigError for unknown keys.
ExperimentConfig apply_overrides(const ExperimentConfig& cfg,
                                 const std::vector<std::string>& assignments);
const std::map<std::string, std::string>& override_aliases();

/// Cross-field checks; throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// 16 hex digits of 64-bit FNV-1a over the canonical JSON.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace estim::harness

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estim/harness/config.hpp"
#include "estim/harness/metrics.hpp"
#include "estim/neural/network.hpp"
#include "estim/sequential/driver.hpp"
#include "estim/ts_replicate/replicate.hpp"

namespace estim::harness {

/// Estimate and bootstrap summary of one replicate at one stage. Stages are
/// iteration numbers for sequential presets and "T<length>" for time-series
/// presets.
struct StageRecord {
  std::size_t replicate = 0;
  std::string stage;
  bool final = false;  // last iteration of a sequential run
  std::vector<double> theta_hat;
  seq::BootstrapSummary summary;
  Tensor training_targets;  // sequential presets only
  ts::ReplicationPlan plan; // time-series presets only
  double wall_seconds = 0.0;
};

struct ReplicateRecord {
  std::size_t replicate = 0;
  std::uint64_t run_seed = 0;
  std::string status;  // converged | not_converged | estimated | failed
  std::string error;   // message of the error that ended a failed replicate
  std::vector<seq::IterationTrace> trace;
};

struct ResultBundle {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<std::string> param_names;
  std::vector<double> truth;  // transformed scale
  std::vector<ReplicateRecord> replicates;
  std::vector<StageRecord> stages;  // replicate-major
  std::vector<MetricRow> metrics;
  nn::TrainedNetwork shared_network;  // time-series presets with a network estimator
  bool has_shared_network = false;
};

/// Runs every replicate of the experiment (in parallel, identical output for
/// any thread count) and tabulates metrics. Throws ConfigError for invalid
/// configs and propagates runtime errors with replicate context.
ResultBundle run_experiment(const ExperimentConfig& cfg);

/// Flattened estimates, replicate-major, one row per parameter.
std::vector<EstimateRow> estimate_rows(const ResultBundle& bundle);

/// Truth on the network (transformed) scale.
std::vector<double> transformed_truth(const ExperimentConfig& cfg);

/// Box sampled in the first iteration when none is configured. For
/// brown-resnick it depends on the observed field.
seq::ParamBounds default_bounds(const ExperimentConfig& cfg, const Tensor& raw_x0);

/// Network spec for the preset: configured hidden stack, the model's input
/// shape, and a dense output of width P.
nn::NetworkSpec network_for(const ExperimentConfig& cfg, std::vector<std::size_t> input_shape);

}  // namespace estim::harness

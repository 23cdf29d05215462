#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "estim/neural/network.hpp"
#include "estim/sequential/bootstrap.hpp"
#include "estim/sequential/bounds.hpp"
#include "estim/sequential/model.hpp"
#include "estim/training_set.hpp"

namespace estim::seq {

struct SequentialConfig {
  ParamBounds initial_bounds;
  nn::NetworkSpec network;
  nn::TrainConfig train;
  std::size_t n_train = 2000;
  std::size_t n_boot = 2000;
  double gamma = 0.3;
  std::size_t max_iterations = 20;
  bool growth = true;
  double growth_rate = 0.05;
  bool replay = false;
  double replay_fraction = 0.4;
  BoundsRule rule = BoundsRule::Basic;
  double bounds_epsilon = 1e-6;
  bool warm_start = false;
  bool keep_training_targets = false;
};

struct IterationTrace {
  std::size_t iteration = 0;  // 1-based
  ParamBounds bounds;         // box sampled in this iteration
  std::size_t n_fresh = 0;
  std::size_t n_replay = 0;
  std::uint64_t train_seed = 0;
  double learning_rate = 0.0;
  bool lr_retry = false;
  double final_loss = 0.0;
  std::vector<double> theta_hat;
  BootstrapSummary summary;
  StopDecision decision;
  bool stopped = false;
  // Box for the next iteration; empty when stopped.
  BoundsUpdate next;
  double wall_seconds = 0.0;
  // Targets the network was trained on (fresh then replayed), when kept.
  Tensor training_targets;
};

enum class RunStatus { Converged, NotConverged };

struct SequentialResult {
  std::vector<IterationTrace> trace;
  RunStatus status = RunStatus::NotConverged;
  nn::TrainedNetwork network;  // network of the last iteration
};

/// Iterate sample -> simulate -> (merge replay) -> train -> estimate ->
/// bootstrap -> stop or update bounds, at most cfg.max_iterations times.
///
/// Iteration k (1-based) draws from RngStream(seed).derive(100 + k): child 0
/// samples parameters, child 1 simulates rows, child 2 seeds training,
/// child 3 the bootstrap and child 4 replay selection. With growth on,
/// N is replaced by ceil(N * (1 + growth_rate)) after every iteration.
///
/// A non-finite training loss is retried once at a tenth of the learning
/// rate. Library errors are rethrown with the iteration number prepended.
SequentialResult run_sequential(const Model& model, const Tensor& x0,
                                const SequentialConfig& cfg, std::uint64_t seed);

std::size_t grown_size(std::size_t n, double rate);

}  // namespace estim::seq

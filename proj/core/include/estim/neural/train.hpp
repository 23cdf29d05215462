#pragma once

#include "estim/neural/network.hpp"
#include "estim/training_set.hpp"

namespace estim::nn {

/// Adam over shuffled mini-batches. Epoch e shuffles with
/// RngStream(cfg.seed).derive(e); the batch size is clamped to the record
/// count. When `warm_start` is given its weights seed the optimisation
/// instead of a fresh Glorot initialisation.
///
/// Throws NonFiniteLossError (1-based epoch) as soon as an epoch's mean loss
/// is not finite.
TrainedNetwork train(const NetworkSpec& spec, const TrainingSet& data, const TrainConfig& cfg,
                     const TrainedNetwork* warm_start = nullptr);

}  // namespace estim::nn

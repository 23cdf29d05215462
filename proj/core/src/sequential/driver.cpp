#include "estim/sequential/driver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "estim/error.hpp"
#include "estim/neural/train.hpp"
#include "estim/sequential/replay.hpp"

namespace estim::seq {

std::size_t grown_size(std::size_t n, double rate) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 + rate) - 1e-9));
}

namespace {

nn::TrainedNetwork train_with_retry(const SequentialConfig& cfg, const TrainingSet& data,
                                    std::uint64_t seed, const nn::TrainedNetwork* warm,
                                    IterationTrace& rec) {
  nn::TrainConfig tc = cfg.train;
  tc.seed = seed;
  rec.learning_rate = tc.learning_rate;
  try {
    return nn::train(cfg.network, data, tc, warm);
  } catch (const NonFiniteLossError&) {
    tc.learning_rate /= 10.0;
    rec.learning_rate = tc.learning_rate;
    rec.lr_retry = true;
    return nn::train(cfg.network, data, tc, warm);
  }
}

}  // namespace

SequentialResult run_sequential(const Model& model, const Tensor& x0,
                                const SequentialConfig& cfg, std::uint64_t seed) {
  cfg.initial_bounds.validate();
  if (cfg.initial_bounds.size() != model.param_dim()) {
    throw Error(Errc::ShapeMismatch, "initial bounds dimension differs from the model's");
  }
  if (cfg.max_iterations == 0) throw Error(Errc::InvalidArgument, "max_iterations must be >= 1");
  if (cfg.n_train == 0) throw Error(Errc::InvalidArgument, "N must be >= 1");

  const RngStream root(seed);
  SequentialResult result;
  ParamBounds bounds = cfg.initial_bounds;
  std::size_t n_train = cfg.n_train;
  TrainingSet buffer;  // replayed records accumulated over iterations
  const nn::TrainedNetwork* warm = nullptr;

  for (std::size_t k = 1; k <= cfg.max_iterations; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const RngStream it = root.derive(100 + k);
    IterationTrace rec;
    rec.iteration = k;
    rec.bounds = bounds;
    try {
      RngStream prior_rng = it.derive(0);
      const Tensor thetas = sample_prior(bounds, n_train, prior_rng, [&](std::span<const double> th) {
        try {
          model.check_domain(th);
          return true;
        } catch (const Error& e) {
          if (e.code() != Errc::SimulatorDomainError) throw;
          return false;
        }
      });
      TrainingSet fresh{simulate_rows(model, thetas, it.derive(1)), thetas, {}, {}, {}};
      for (std::size_t n = 0; n < n_train; ++n) {
        fresh.ids.push_back((static_cast<std::uint64_t>(k) << 32) | n);
        fresh.origin_iteration.push_back(static_cast<std::uint32_t>(k));
        fresh.replayed.push_back(0);
      }
      const TrainingSet data = merge_records(fresh, buffer);
      rec.n_fresh = fresh.size();
      rec.n_replay = buffer.size();
      if (cfg.keep_training_targets) rec.training_targets = data.targets;

      rec.train_seed = it.derive(2).next_u64();
      result.network = train_with_retry(cfg, data, rec.train_seed, warm, rec);
      if (cfg.warm_start) warm = &result.network;
      rec.final_loss = result.network.loss_history.empty() ? 0.0
                                                           : result.network.loss_history.back();

      rec.theta_hat = estimate(result.network, x0);
      rec.summary = bootstrap_uncertainty(result.network, model, rec.theta_hat, cfg.n_boot,
                                          it.derive(3));
      rec.decision = stop_check(rec.summary, cfg.gamma);
      rec.stopped = rec.decision.stop;
      if (!rec.stopped) {
        rec.next = update_bounds(rec.theta_hat, rec.summary, cfg.rule, cfg.bounds_epsilon);
        if (cfg.replay) {
          RngStream replay_rng = it.derive(4);
          auto picked = replay_select(fresh, rec.next.bounds, cfg.replay_fraction, replay_rng);
          TrainingSet chosen = select_records(fresh, picked);
          std::fill(chosen.replayed.begin(), chosen.replayed.end(), 1);
          buffer = merge_records(buffer, chosen);
        }
      }
    } catch (const Error& e) {
      throw e.with_context("iteration " + std::to_string(k));
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool stopped = rec.stopped;
    ParamBounds next = rec.next.bounds;
    result.trace.push_back(std::move(rec));
    if (stopped) {
      result.status = RunStatus::Converged;
      break;
    }
    bounds = std::move(next);
    if (cfg.growth) n_train = grown_size(n_train, cfg.growth_rate);
  }
  return result;
}

}  // namespace estim::seq

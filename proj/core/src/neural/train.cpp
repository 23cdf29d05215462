#include "estim/neural/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "engine.hpp"
#include "estim/core_math/rng.hpp"
#include "estim/error.hpp"

namespace estim::nn {

namespace {

struct Adam {
  std::vector<Tensor> m, v;
  std::size_t t = 0;

  explicit Adam(const std::vector<Tensor>& weights) {
    for (const auto& w : weights) {
      m.emplace_back(w.shape());
      v.emplace_back(w.shape());
    }
  }

  void step(std::vector<Tensor>& weights, const std::vector<Tensor>& grads,
            const TrainConfig& cfg) {
    ++t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    const double step = cfg.learning_rate * std::sqrt(c2) / c1;
    const double eps = cfg.epsilon * std::sqrt(c2);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      double* w = weights[k].data();
      double* mk = m[k].data();
      double* vk = v[k].data();
      const double* g = grads[k].data();
      for (std::size_t i = 0; i < weights[k].size(); ++i) {
        mk[i] = cfg.beta1 * mk[i] + (1.0 - cfg.beta1) * g[i];
        vk[i] = cfg.beta2 * vk[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        w[i] -= step * mk[i] / (std::sqrt(vk[i]) + eps);
      }
    }
  }
};

}  // namespace

TrainedNetwork train(const NetworkSpec& spec, const TrainingSet& data, const TrainConfig& cfg,
                     const TrainedNetwork* warm_start) {
  if (data.size() == 0) throw Error(Errc::EmptySample, "training set is empty");
  if (!(cfg.learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be > 0");
  if (cfg.batch_size == 0) throw Error(Errc::InvalidArgument, "batch size must be > 0");
  const auto plan = detail::compile(spec);
  const std::size_t n = data.size();
  if (data.inputs.size() != n * plan.input_size) {
    throw Error(Errc::ShapeMismatch, "training inputs do not match the network input shape");
  }
  if (data.targets.rank() != 2 || data.targets.dim(1) != plan.output_size) {
    throw Error(Errc::ShapeMismatch, "training targets must be {N, output_dim}");
  }

  TrainedNetwork net;
  if (warm_start != nullptr) {
    if (!(warm_start->spec == spec)) {
      throw Error(Errc::ShapeMismatch, "warm-start network has a different spec");
    }
    net = *warm_start;
    net.loss_history.clear();
  } else {
    net = initialize(spec, cfg.seed);
  }
  net.config = cfg;

  const std::size_t batch = std::min(cfg.batch_size, n);
  const std::size_t in_size = plan.input_size;
  const std::size_t out_size = plan.output_size;
  const double* x = data.inputs.data();
  const double* y = data.targets.data();

  Adam adam(net.weights);
  detail::Workspace ws(plan);
  std::vector<Tensor> grads;
  for (const auto& w : net.weights) grads.emplace_back(w.shape());
  std::vector<std::size_t> order(n);
  RngStream shuffle_root(cfg.seed, 0x5348);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng = shuffle_root.derive(epoch);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const std::size_t bsz = stop - start;
      for (auto& g : grads) std::fill(g.values().begin(), g.values().end(), 0.0);
      const double scale = 2.0 / static_cast<double>(bsz * out_size);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t r = order[k];
        detail::forward_sample(plan, net.weights, {x + r * in_size, in_size}, ws);
        auto& out = ws.acts.back();
        auto& gout = ws.grads.back();
        for (std::size_t p = 0; p < out_size; ++p) {
          const double d = out[p] - y[r * out_size + p];
          epoch_loss += d * d;
          gout[p] = scale * d;
        }
        detail::backward_sample(plan, net.weights, ws, grads);
      }
      adam.step(net.weights, grads, cfg);
    }
    epoch_loss /= static_cast<double>(n * out_size);
    if (!std::isfinite(epoch_loss)) throw NonFiniteLossError(epoch + 1, epoch_loss);
    net.loss_history.push_back(epoch_loss);
  }
  for (const auto& w : net.weights) {
    if (!w.all_finite()) {
      throw NonFiniteLossError(cfg.epochs, std::numeric_limits<double>::quiet_NaN());
    }
  }
  return net;
}

}  // namespace estim::nn

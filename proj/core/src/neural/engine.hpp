#pragma once

// Internal execution plan shared by forward, backprop and training.

#include <cstddef>
#include <span>
#include <vector>

#include "estim/neural/network.hpp"

namespace estim::nn::detail {

struct CompiledLayer {
  LayerKind kind;
  // Activations are viewed as channels x height x width.
  std::size_t in_c, in_h, in_w;
  std::size_t out_c, out_h, out_w;
  std::size_t kh, kw;
  int weight_index;  // index of the weight tensor, bias follows; -1 if none

  std::size_t in_size() const { return in_c * in_h * in_w; }
  std::size_t out_size() const { return out_c * out_h * out_w; }
};

struct Plan {
  std::vector<CompiledLayer> layers;
  std::size_t input_size = 0;
  std::size_t output_size = 0;
};

Plan compile(const NetworkSpec& spec);

/// Per-sample scratch buffers sized for a plan.
struct Workspace {
  explicit Workspace(const Plan& plan);
  std::vector<std::vector<double>> acts;   // acts[0] is the input copy
  std::vector<std::vector<double>> grads;  // gradient w.r.t. acts[i]
};

void forward_sample(const Plan& plan, std::span<const Tensor> weights,
                    std::span<const double> input, Workspace& ws);

/// Backpropagates ws.grads.back() (set by the caller) and accumulates
/// parameter gradients into `accum`.
void backward_sample(const Plan& plan, std::span<const Tensor> weights, Workspace& ws,
                     std::span<Tensor> accum);

}  // namespace estim::nn::detail

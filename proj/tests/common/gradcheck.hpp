#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/neural/network.hpp"

namespace estim::gradcheck {

struct GradCase {
  std::string name;
  nn::NetworkSpec spec;
};

inline std::vector<GradCase> gradient_cases() {
  using nn::LayerSpec;
  auto make = [](std::string name, std::vector<std::size_t> in, std::vector<LayerSpec> layers,
                 std::size_t out) {
    layers.push_back(LayerSpec::dense(out));
    return GradCase{std::move(name), nn::NetworkSpec{std::move(in), std::move(layers), out}};
  };
  return {
      make("dense", {6}, {LayerSpec::dense(5)}, 3),
      make("relu", {6}, {LayerSpec::dense(8), LayerSpec::relu()}, 2),
      make("conv1d", {12}, {LayerSpec::conv1d(3, 3), LayerSpec::relu(), LayerSpec::flatten()}, 2),
      make("conv1d-channels", {2, 10},
           {LayerSpec::conv1d(3, 3), LayerSpec::relu(), LayerSpec::conv1d(2, 3), LayerSpec::flatten()}, 2),
      make("conv2d", {6, 6},
           {LayerSpec::conv2d(3, 3, 3), LayerSpec::relu(), LayerSpec::conv2d(2, 3, 3), LayerSpec::flatten()}, 2),
      make("conv2d-channels", {2, 5, 4}, {LayerSpec::conv2d(3, 3, 2), LayerSpec::flatten()}, 2),
      make("flatten", {3, 4}, {LayerSpec::flatten(), LayerSpec::dense(4), LayerSpec::relu()}, 2),
  };
}

struct GradCheck {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst = 0.0;
};

// Central differences with step h on every trainable entry, relative error
// |a - fd| / (|a| + 1e-8).
inline GradCheck gradient_check(const nn::NetworkSpec& spec, std::uint64_t seed, std::size_t batch = 4,
                                double h = 1e-5, double tol = 1e-4) {
  RngStream rng(seed);
  nn::TrainedNetwork net = nn::initialize(spec, seed);
  for (auto& w : net.weights) {
    for (auto& v : w.values()) v += 0.1 * rng.normal();
  }
  std::vector<std::size_t> in_shape{batch};
  in_shape.insert(in_shape.end(), spec.input_shape.begin(), spec.input_shape.end());
  Tensor x(in_shape);
  for (auto& v : x.values()) v = rng.normal();
  Tensor y = Tensor::matrix(batch, spec.output_dim);
  for (auto& v : y.values()) v = rng.normal();

  const nn::Gradients g = nn::backprop(net, x, y);
  GradCheck out;
  for (std::size_t t = 0; t < net.weights.size(); ++t) {
    for (std::size_t i = 0; i < net.weights[t].size(); ++i) {
      const double w0 = net.weights[t][i];
      net.weights[t][i] = w0 + h;
      const double up = nn::mse_loss(nn::forward(net, x), y);
      net.weights[t][i] = w0 - h;
      const double down = nn::mse_loss(nn::forward(net, x), y);
      net.weights[t][i] = w0;
      const double fd = (up - down) / (2.0 * h);
      const double a = g.weights[t][i];
      const double rel = std::abs(a - fd) / (std::abs(a) + 1e-8);
      ++out.checked;
      out.worst = std::max(out.worst, rel);
      if (!(rel < tol)) ++out.failed;
    }
  }
  return out;
}

}  // namespace estim::gradcheck

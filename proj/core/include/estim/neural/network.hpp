#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "estim/core_math/tensor.hpp"

namespace estim::nn {

enum class LayerKind { Dense, Conv1d, Conv2d, Relu, Flatten };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

/// One layer of a feed-forward stack. Convolutions are stride 1 with no
/// padding ("valid"), so each spatial extent shrinks by kernel - 1.
struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  std::size_t units = 0;     // dense units or convolution filters
  std::size_t kernel_h = 0;  // conv2d only
  std::size_t kernel_w = 0;  // conv1d / conv2d

  static LayerSpec dense(std::size_t units);
  static LayerSpec conv1d(std::size_t filters, std::size_t kernel);
  static LayerSpec conv2d(std::size_t filters, std::size_t kernel_h, std::size_t kernel_w);
  static LayerSpec relu();
  static LayerSpec flatten();

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
  std::vector<std::size_t> input_shape;
  std::vector<LayerSpec> layers;
  std::size_t output_dim = 0;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

  /// Single hidden layer perceptron: dense(hidden) -> relu -> dense(out).
  static NetworkSpec mlp(std::size_t inputs, std::size_t hidden, std::size_t outputs);
  /// Stack of conv1d+relu blocks, then flatten -> dense(dense_units) -> relu -> dense(out).
  static NetworkSpec cnn1d(std::size_t length, std::vector<std::size_t> filters, std::size_t kernel,
                           std::size_t dense_units, std::size_t outputs);
  /// Stack of conv2d+relu blocks, then flatten -> dense(dense_units) -> relu -> dense(out).
  static NetworkSpec cnn2d(std::size_t height, std::size_t width, std::vector<std::size_t> filters,
                           std::size_t kernel, std::size_t dense_units, std::size_t outputs);
};

/// Activation shape after each layer; element 0 is the (normalised) input
/// shape. Throws ShapeMismatch when the stack does not compose or the final
/// width differs from output_dim.
std::vector<std::vector<std::size_t>> resolve_shapes(const NetworkSpec& spec);

/// Shapes of the trainable tensors, in storage order (weight then bias for
/// every parametrised layer).
std::vector<std::vector<std::size_t>> parameter_shapes(const NetworkSpec& spec);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 30;
  std::size_t batch_size = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainedNetwork {
  NetworkSpec spec;
  std::vector<Tensor> weights;
  std::vector<double> loss_history;
  TrainConfig config;

  friend bool operator==(const TrainedNetwork&, const TrainedNetwork&) = default;
};

/// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))) and zero biases.
TrainedNetwork initialize(const NetworkSpec& spec, std::uint64_t seed);

/// Network with every weight and bias set to zero.
TrainedNetwork zero_network(const NetworkSpec& spec);

/// Predictions for a batch shaped {B, input_shape...}; returns {B, P}.
Tensor forward(const TrainedNetwork& net, const Tensor& batch);

/// Prediction for one sample laid out as input_shape.
std::vector<double> predict_one(const TrainedNetwork& net, std::span<const double> sample);

/// Mean over all entries of the squared difference.
double mse_loss(const Tensor& pred, const Tensor& target);

struct Gradients {
  double loss = 0.0;
  std::vector<Tensor> weights;
};

/// Loss and gradients of the batch-mean MSE (normalised by B * P) with
/// respect to every trainable tensor.
Gradients backprop(const TrainedNetwork& net, const Tensor& batch, const Tensor& targets);

std::size_t parameter_count(const TrainedNetwork& net);

}  // namespace estim::nn

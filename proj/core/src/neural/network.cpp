#include "estim/neural/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "engine.hpp"
#include "estim/core_math/rng.hpp"
#include "estim/error.hpp"

namespace estim::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv1d: return "conv1d";
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Relu: return "relu";
    case LayerKind::Flatten: return "flatten";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(const std::string& name) {
  if (name == "dense") return LayerKind::Dense;
  if (name == "conv1d") return LayerKind::Conv1d;
  if (name == "conv2d") return LayerKind::Conv2d;
  if (name == "relu") return LayerKind::Relu;
  if (name == "flatten") return LayerKind::Flatten;
  throw Error(Errc::InvalidArgument, "unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::dense(std::size_t units) { return {LayerKind::Dense, units, 0, 0}; }
LayerSpec LayerSpec::conv1d(std::size_t filters, std::size_t kernel) {
  return {LayerKind::Conv1d, filters, 1, kernel};
}
LayerSpec LayerSpec::conv2d(std::size_t filters, std::size_t kernel_h, std::size_t kernel_w) {
  return {LayerKind::Conv2d, filters, kernel_h, kernel_w};
}
LayerSpec LayerSpec::relu() { return {LayerKind::Relu, 0, 0, 0}; }
LayerSpec LayerSpec::flatten() { return {LayerKind::Flatten, 0, 0, 0}; }

NetworkSpec NetworkSpec::mlp(std::size_t inputs, std::size_t hidden, std::size_t outputs) {
  return {{inputs}, {LayerSpec::dense(hidden), LayerSpec::relu(), LayerSpec::dense(outputs)},
          outputs};
}

NetworkSpec NetworkSpec::cnn1d(std::size_t length, std::vector<std::size_t> filters,
                               std::size_t kernel, std::size_t dense_units, std::size_t outputs) {
  NetworkSpec spec{{length}, {}, outputs};
  for (auto f : filters) {
    spec.layers.push_back(LayerSpec::conv1d(f, kernel));
    spec.layers.push_back(LayerSpec::relu());
  }
  spec.layers.push_back(LayerSpec::flatten());
  spec.layers.push_back(LayerSpec::dense(dense_units));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::dense(outputs));
  return spec;
}

NetworkSpec NetworkSpec::cnn2d(std::size_t height, std::size_t width,
                               std::vector<std::size_t> filters, std::size_t kernel,
                               std::size_t dense_units, std::size_t outputs) {
  NetworkSpec spec{{height, width}, {}, outputs};
  for (auto f : filters) {
    spec.layers.push_back(LayerSpec::conv2d(f, kernel, kernel));
    spec.layers.push_back(LayerSpec::relu());
  }
  spec.layers.push_back(LayerSpec::flatten());
  spec.layers.push_back(LayerSpec::dense(dense_units));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::dense(outputs));
  return spec;
}

namespace detail {

namespace {

[[noreturn]] void mismatch(std::size_t layer, const std::string& what) {
  std::ostringstream os;
  os << "layer " << layer << ": " << what;
  throw Error(Errc::ShapeMismatch, os.str());
}

}  // namespace

Plan compile(const NetworkSpec& spec) {
  if (spec.input_shape.empty() || spec.input_shape.size() > 3) {
    throw Error(Errc::ShapeMismatch, "input shape must have rank 1, 2 or 3");
  }
  for (auto e : spec.input_shape) {
    if (e == 0) throw Error(Errc::ShapeMismatch, "input shape has a zero extent");
  }
  Plan plan;
  std::vector<std::size_t> shape = spec.input_shape;
  plan.input_size = shape_product(shape);
  int next_weight = 0;
  for (std::size_t li = 0; li < spec.layers.size(); ++li) {
    const auto& l = spec.layers[li];
    CompiledLayer c{l.kind, 1, 1, 1, 1, 1, 1, 0, 0, -1};
    switch (l.kind) {
      case LayerKind::Dense: {
        if (shape.size() != 1) mismatch(li, "dense layer needs a rank-1 input (add flatten)");
        if (l.units == 0) mismatch(li, "dense layer needs units > 0");
        c.in_w = shape[0];
        c.out_w = l.units;
        c.weight_index = next_weight;
        next_weight += 2;
        shape = {l.units};
        break;
      }
      case LayerKind::Conv1d: {
        if (shape.size() == 1) {
          c.in_c = 1;
          c.in_w = shape[0];
        } else if (shape.size() == 2) {
          c.in_c = shape[0];
          c.in_w = shape[1];
        } else {
          mismatch(li, "conv1d needs a {length} or {channels, length} input");
        }
        if (l.units == 0 || l.kernel_w == 0) mismatch(li, "conv1d needs filters and kernel > 0");
        if (l.kernel_w > c.in_w) mismatch(li, "conv1d kernel longer than its input");
        c.kh = 1;
        c.kw = l.kernel_w;
        c.out_c = l.units;
        c.out_w = c.in_w - c.kw + 1;
        c.weight_index = next_weight;
        next_weight += 2;
        shape = {c.out_c, c.out_w};
        break;
      }
      case LayerKind::Conv2d: {
        if (shape.size() == 2) {
          c.in_h = shape[0];
          c.in_w = shape[1];
        } else if (shape.size() == 3) {
          c.in_c = shape[0];
          c.in_h = shape[1];
          c.in_w = shape[2];
        } else {
          mismatch(li, "conv2d needs a {h, w} or {channels, h, w} input");
        }
        if (l.units == 0 || l.kernel_h == 0 || l.kernel_w == 0) {
          mismatch(li, "conv2d needs filters and kernel > 0");
        }
        if (l.kernel_h > c.in_h || l.kernel_w > c.in_w) mismatch(li, "conv2d kernel exceeds input");
        c.kh = l.kernel_h;
        c.kw = l.kernel_w;
        c.out_c = l.units;
        c.out_h = c.in_h - c.kh + 1;
        c.out_w = c.in_w - c.kw + 1;
        c.weight_index = next_weight;
        next_weight += 2;
        shape = {c.out_c, c.out_h, c.out_w};
        break;
      }
      case LayerKind::Relu:
      case LayerKind::Flatten: {
        c.in_w = shape_product(shape);
        c.out_w = c.in_w;
        if (l.kind == LayerKind::Flatten) shape = {c.in_w};
        break;
      }
    }
    plan.layers.push_back(c);
  }
  if (shape.size() != 1 || shape[0] != spec.output_dim) {
    std::ostringstream os;
    os << "final layer width " << shape_product(shape) << " (rank " << shape.size()
       << ") does not match output_dim " << spec.output_dim;
    throw Error(Errc::ShapeMismatch, os.str());
  }
  plan.output_size = spec.output_dim;
  return plan;
}

Workspace::Workspace(const Plan& plan) {
  acts.emplace_back(plan.input_size);
  grads.emplace_back(plan.input_size);
  for (const auto& l : plan.layers) {
    acts.emplace_back(l.out_size());
    grads.emplace_back(l.out_size());
  }
}

namespace {

void conv_forward(const CompiledLayer& l, const double* kernel, const double* bias,
                  const double* in, double* out) {
  const std::size_t oh = l.out_h, ow = l.out_w, ih = l.in_h, iw = l.in_w;
  for (std::size_t f = 0; f < l.out_c; ++f) {
    double* of = out + f * oh * ow;
    std::fill(of, of + oh * ow, bias[f]);
    for (std::size_t c = 0; c < l.in_c; ++c) {
      const double* ic = in + c * ih * iw;
      const double* kfc = kernel + (f * l.in_c + c) * l.kh * l.kw;
      for (std::size_t ky = 0; ky < l.kh; ++ky) {
        for (std::size_t kx = 0; kx < l.kw; ++kx) {
          const double w = kfc[ky * l.kw + kx];
          for (std::size_t y = 0; y < oh; ++y) {
            const double* src = ic + (y + ky) * iw + kx;
            double* dst = of + y * ow;
            for (std::size_t x = 0; x < ow; ++x) dst[x] += w * src[x];
          }
        }
      }
    }
  }
}

void conv_backward(const CompiledLayer& l, const double* kernel, const double* in,
                   const double* gout, double* gin, double* gkernel, double* gbias) {
  const std::size_t oh = l.out_h, ow = l.out_w, ih = l.in_h, iw = l.in_w;
  for (std::size_t f = 0; f < l.out_c; ++f) {
    const double* gf = gout + f * oh * ow;
    double bsum = 0.0;
    for (std::size_t i = 0; i < oh * ow; ++i) bsum += gf[i];
    gbias[f] += bsum;
    for (std::size_t c = 0; c < l.in_c; ++c) {
      const double* ic = in + c * ih * iw;
      double* gic = gin == nullptr ? nullptr : gin + c * ih * iw;
      const std::size_t koff = (f * l.in_c + c) * l.kh * l.kw;
      for (std::size_t ky = 0; ky < l.kh; ++ky) {
        for (std::size_t kx = 0; kx < l.kw; ++kx) {
          const double w = kernel[koff + ky * l.kw + kx];
          double acc = 0.0;
          for (std::size_t y = 0; y < oh; ++y) {
            const double* src = ic + (y + ky) * iw + kx;
            const double* g = gf + y * ow;
            for (std::size_t x = 0; x < ow; ++x) acc += g[x] * src[x];
            if (gic != nullptr) {
              double* dst = gic + (y + ky) * iw + kx;
              for (std::size_t x = 0; x < ow; ++x) dst[x] += w * g[x];
            }
          }
          gkernel[koff + ky * l.kw + kx] += acc;
        }
      }
    }
  }
}

}  // namespace

void forward_sample(const Plan& plan, std::span<const Tensor> weights,
                    std::span<const double> input, Workspace& ws) {
  std::copy(input.begin(), input.end(), ws.acts[0].begin());
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    const auto& l = plan.layers[i];
    const double* in = ws.acts[i].data();
    double* out = ws.acts[i + 1].data();
    switch (l.kind) {
      case LayerKind::Dense: {
        const double* w = weights[l.weight_index].data();
        const double* b = weights[l.weight_index + 1].data();
        for (std::size_t o = 0; o < l.out_w; ++o) {
          const double* wo = w + o * l.in_w;
          double s = b[o];
          for (std::size_t k = 0; k < l.in_w; ++k) s += wo[k] * in[k];
          out[o] = s;
        }
        break;
      }
      case LayerKind::Conv1d:
      case LayerKind::Conv2d:
        conv_forward(l, weights[l.weight_index].data(), weights[l.weight_index + 1].data(), in,
                     out);
        break;
      case LayerKind::Relu:
        for (std::size_t k = 0; k < l.out_w; ++k) out[k] = in[k] > 0.0 ? in[k] : 0.0;
        break;
      case LayerKind::Flatten:
        std::copy_n(in, l.out_w, out);
        break;
    }
  }
}

void backward_sample(const Plan& plan, std::span<const Tensor> weights, Workspace& ws,
                     std::span<Tensor> accum) {
  for (std::size_t ii = plan.layers.size(); ii-- > 0;) {
    const auto& l = plan.layers[ii];
    const double* in = ws.acts[ii].data();
    const double* gout = ws.grads[ii + 1].data();
    // The input gradient of the first layer is never needed.
    double* gin = ii == 0 ? nullptr : ws.grads[ii].data();
    switch (l.kind) {
      case LayerKind::Dense: {
        const double* w = weights[l.weight_index].data();
        double* gw = accum[l.weight_index].data();
        double* gb = accum[l.weight_index + 1].data();
        if (gin != nullptr) std::fill(gin, gin + l.in_w, 0.0);
        for (std::size_t o = 0; o < l.out_w; ++o) {
          const double g = gout[o];
          gb[o] += g;
          if (g == 0.0) continue;
          double* gwo = gw + o * l.in_w;
          const double* wo = w + o * l.in_w;
          for (std::size_t k = 0; k < l.in_w; ++k) gwo[k] += g * in[k];
          if (gin != nullptr) {
            for (std::size_t k = 0; k < l.in_w; ++k) gin[k] += g * wo[k];
          }
        }
        break;
      }
      case LayerKind::Conv1d:
      case LayerKind::Conv2d:
        if (gin != nullptr) std::fill(gin, gin + l.in_size(), 0.0);
        conv_backward(l, weights[l.weight_index].data(), in, gout, gin,
                      accum[l.weight_index].data(), accum[l.weight_index + 1].data());
        break;
      case LayerKind::Relu:
        if (gin != nullptr) {
          for (std::size_t k = 0; k < l.out_w; ++k) gin[k] = in[k] > 0.0 ? gout[k] : 0.0;
        }
        break;
      case LayerKind::Flatten:
        if (gin != nullptr) std::copy_n(gout, l.out_w, gin);
        break;
    }
  }
}

}  // namespace detail

std::vector<std::vector<std::size_t>> resolve_shapes(const NetworkSpec& spec) {
  const auto plan = detail::compile(spec);
  std::vector<std::vector<std::size_t>> shapes{spec.input_shape};
  for (const auto& l : plan.layers) {
    switch (l.kind) {
      case LayerKind::Dense:
      case LayerKind::Flatten:
        shapes.push_back({l.out_w});
        break;
      case LayerKind::Conv1d:
        shapes.push_back({l.out_c, l.out_w});
        break;
      case LayerKind::Conv2d:
        shapes.push_back({l.out_c, l.out_h, l.out_w});
        break;
      case LayerKind::Relu:
        shapes.push_back(shapes.back());
        break;
    }
  }
  return shapes;
}

std::vector<std::vector<std::size_t>> parameter_shapes(const NetworkSpec& spec) {
  const auto plan = detail::compile(spec);
  std::vector<std::vector<std::size_t>> shapes;
  for (const auto& l : plan.layers) {
    switch (l.kind) {
      case LayerKind::Dense:
        shapes.push_back({l.out_w, l.in_w});
        shapes.push_back({l.out_w});
        break;
      case LayerKind::Conv1d:
        shapes.push_back({l.out_c, l.in_c, l.kw});
        shapes.push_back({l.out_c});
        break;
      case LayerKind::Conv2d:
        shapes.push_back({l.out_c, l.in_c, l.kh, l.kw});
        shapes.push_back({l.out_c});
        break;
      default:
        break;
    }
  }
  return shapes;
}

TrainedNetwork zero_network(const NetworkSpec& spec) {
  TrainedNetwork net{spec, {}, {}, {}};
  for (auto& s : parameter_shapes(spec)) net.weights.emplace_back(s);
  return net;
}

TrainedNetwork initialize(const NetworkSpec& spec, std::uint64_t seed) {
  TrainedNetwork net = zero_network(spec);
  RngStream rng(seed, 0x1417);
  for (std::size_t i = 0; i < net.weights.size(); i += 2) {
    auto& w = net.weights[i];
    const auto& s = w.shape();
    // Receptive field size multiplies channel counts for convolutions.
    const std::size_t receptive = shape_product(std::span(s).subspan(2));
    const double fan_out = static_cast<double>(s[0] * receptive);
    const double fan_in = static_cast<double>(s[1] * receptive);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w.values()) v = rng.uniform(-limit, limit);
  }
  return net;
}

namespace {

void check_batch(const NetworkSpec& spec, const Tensor& batch) {
  const auto& s = batch.shape();
  if (s.size() != spec.input_shape.size() + 1 ||
      !std::equal(spec.input_shape.begin(), spec.input_shape.end(), s.begin() + 1)) {
    std::ostringstream os;
    os << "batch shape [";
    for (auto e : s) os << e << ' ';
    os << "] does not match network input [";
    for (auto e : spec.input_shape) os << e << ' ';
    os << "] with a leading batch axis";
    throw Error(Errc::ShapeMismatch, os.str());
  }
}

}  // namespace

Tensor forward(const TrainedNetwork& net, const Tensor& batch) {
  check_batch(net.spec, batch);
  const auto plan = detail::compile(net.spec);
  detail::Workspace ws(plan);
  const std::size_t n = batch.dim(0);
  Tensor out = Tensor::matrix(n, plan.output_size);
  for (std::size_t i = 0; i < n; ++i) {
    detail::forward_sample(plan, net.weights, batch.row(i), ws);
    std::copy(ws.acts.back().begin(), ws.acts.back().end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> predict_one(const TrainedNetwork& net, std::span<const double> sample) {
  const auto plan = detail::compile(net.spec);
  if (sample.size() != plan.input_size) {
    throw Error(Errc::ShapeMismatch, "sample length does not match network input size");
  }
  detail::Workspace ws(plan);
  detail::forward_sample(plan, net.weights, sample, ws);
  return ws.acts.back();
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) throw Error(Errc::ShapeMismatch, "mse_loss shapes differ");
  if (pred.empty()) throw Error(Errc::EmptySample, "mse_loss of empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

Gradients backprop(const TrainedNetwork& net, const Tensor& batch, const Tensor& targets) {
  check_batch(net.spec, batch);
  const auto plan = detail::compile(net.spec);
  const std::size_t n = batch.dim(0);
  if (targets.rank() != 2 || targets.dim(0) != n || targets.dim(1) != plan.output_size) {
    throw Error(Errc::ShapeMismatch, "targets must be {batch, output_dim}");
  }
  Gradients g;
  for (const auto& w : net.weights) g.weights.emplace_back(w.shape());
  detail::Workspace ws(plan);
  const double scale = 2.0 / static_cast<double>(n * plan.output_size);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    detail::forward_sample(plan, net.weights, batch.row(i), ws);
    auto& out = ws.acts.back();
    auto& gout = ws.grads.back();
    const auto t = targets.row(i);
    for (std::size_t p = 0; p < plan.output_size; ++p) {
      const double d = out[p] - t[p];
      loss += d * d;
      gout[p] = scale * d;
    }
    detail::backward_sample(plan, net.weights, ws, g.weights);
  }
  g.loss = loss / static_cast<double>(n * plan.output_size);
  return g;
}

std::size_t parameter_count(const TrainedNetwork& net) {
  std::size_t n = 0;
  for (const auto& w : net.weights) n += w.size();
  return n;
}

}  // namespace estim::nn

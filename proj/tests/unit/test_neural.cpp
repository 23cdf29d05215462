#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"
#include "estim/neural/network.hpp"
#include "estim/neural/serialize.hpp"
#include "estim/neural/train.hpp"
#include "estim/training_set.hpp"
#include "gradcheck.hpp"

using namespace estim;
using nn::LayerSpec;
using nn::NetworkSpec;

namespace {

TrainingSet make_set(Tensor inputs, Tensor targets) {
  TrainingSet s{std::move(inputs), std::move(targets), {}, {}, {}};
  const std::size_t n = s.size();
  s.ids.resize(n);
  std::iota(s.ids.begin(), s.ids.end(), 0);
  s.origin_iteration.assign(n, 1);
  s.replayed.assign(n, 0);
  return s;
}

}  // namespace

TEST(Forward, ZeroNetworkGivesZeros) {
  const auto net = nn::zero_network(NetworkSpec::mlp(4, 7, 2));
  const Tensor out = nn::forward(net, Tensor::from_rows({{1, -2, 3, 4}, {5, 6, 7, 8}}));
  EXPECT_EQ(out.shape(), (std::vector<std::size_t>{2, 2}));
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, IdentityDense) {
  auto net = nn::zero_network(NetworkSpec{{3}, {LayerSpec::dense(3)}, 3});
  for (std::size_t i = 0; i < 3; ++i) net.weights[0](i, i) = 1.0;
  const Tensor out = nn::forward(net, Tensor::from_rows({{1.5, -2, 7}}));
  EXPECT_EQ(out.storage(), (std::vector<double>{1.5, -2, 7}));
}

TEST(Forward, Conv1dHandExample) {
  auto net = nn::zero_network(NetworkSpec{{4}, {LayerSpec::conv1d(1, 3), LayerSpec::flatten()}, 2});
  for (auto& v : net.weights[0].values()) v = 1.0;
  const Tensor out = nn::forward(net, Tensor::from_rows({{1, 2, 3, 4}}));
  EXPECT_EQ(out.storage(), (std::vector<double>{6, 9}));
}

TEST(Forward, BatchEqualsRowwise) {
  const auto spec = NetworkSpec::cnn2d(6, 5, {3, 2}, 3, 4, 2);
  const auto net = nn::initialize(spec, 3);
  RngStream rng(4);
  Tensor batch({5, 6, 5});
  for (auto& v : batch.values()) v = rng.normal();
  const Tensor out = nn::forward(net, batch);
  for (std::size_t b = 0; b < 5; ++b) {
    const auto one = nn::predict_one(net, batch.row(b));
    for (std::size_t p = 0; p < 2; ++p) EXPECT_DOUBLE_EQ(out(b, p), one[p]);
  }
}

TEST(Forward, WrongInputShapeThrows) {
  const auto net = nn::initialize(NetworkSpec::mlp(4, 3, 1), 1);
  try {
    nn::forward(net, Tensor::matrix(2, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

TEST(Spec, NonComposingStackThrows) {
  const NetworkSpec bad{{4, 4}, {LayerSpec::dense(3)}, 3};
  EXPECT_THROW(nn::resolve_shapes(bad), Error);
  const NetworkSpec wrong_out{{4}, {LayerSpec::dense(3)}, 2};
  EXPECT_THROW(nn::resolve_shapes(wrong_out), Error);
}

TEST(Loss, HandExamples) {
  EXPECT_DOUBLE_EQ(nn::mse_loss(Tensor::vector({1, 2}), Tensor::vector({1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(nn::mse_loss(Tensor::vector({0, 0}), Tensor::vector({1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(nn::mse_loss(Tensor::vector({1, 2}), Tensor::vector({0, 4})), 2.5);
  EXPECT_THROW(nn::mse_loss(Tensor::vector({1}), Tensor::vector({1, 2})), Error);
}

TEST(Backprop, ZeroResidualZeroGradient) {
  const auto net = nn::initialize(NetworkSpec::mlp(3, 5, 2), 8);
  const Tensor x = Tensor::from_rows({{0.1, 0.2, -0.3}, {1, 0, 2}});
  const Tensor y = nn::forward(net, x);
  const auto g = nn::backprop(net, x, y);
  EXPECT_EQ(g.loss, 0.0);
  for (const auto& t : g.weights) {
    for (double v : t.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Backprop, SingleDenseClosedForm) {
  auto net = nn::initialize(NetworkSpec{{3}, {LayerSpec::dense(2)}, 2}, 5);
  const std::vector<double> x{0.5, -1.0, 2.0};
  const Tensor batch = Tensor::from_rows({{0.5, -1.0, 2.0}});
  const Tensor target = Tensor::from_rows({{0.3, -0.7}});
  const Tensor pred = nn::forward(net, batch);
  const auto g = nn::backprop(net, batch, target);
  const auto wshape = net.weights[0].shape();
  for (std::size_t o = 0; o < 2; ++o) {
    const double r = 2.0 * (pred(0, o) - target(0, o)) / 2.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double got = wshape[0] == 2 ? g.weights[0](o, i) : g.weights[0](i, o);
      EXPECT_NEAR(got, r * x[i], 1e-14);
    }
    EXPECT_NEAR(g.weights[1][o], r, 1e-14);
  }
}

TEST(Backprop, FiniteDifferencePerLayerKind) {
  for (const auto& c : gradcheck::gradient_cases()) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto r = gradcheck::gradient_check(c.spec, seed);
      EXPECT_EQ(r.failed, 0u) << c.name << " seed " << seed << " worst " << r.worst;
      EXPECT_GT(r.checked, 0u);
    }
  }
}

TEST(Train, MemorizesOneRecord) {
  const auto spec = NetworkSpec::mlp(5, 16, 2);
  const auto data = make_set(Tensor::from_rows({{0.2, -0.1, 0.4, 1.0, -0.5}}), Tensor::from_rows({{1.5, -0.5}}));
  nn::TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.batch_size = 1;
  cfg.learning_rate = 0.01;
  const auto net = nn::train(spec, data, cfg);
  EXPECT_LT(net.loss_history.back(), 1e-6);
  EXPECT_EQ(net.loss_history.size(), cfg.epochs);
  const auto p = nn::predict_one(net, data.inputs.row(0));
  EXPECT_NEAR(p[0], 1.5, 1e-3);
  EXPECT_NEAR(p[1], -0.5, 1e-3);
}

TEST(Train, LinearRegressionOracle) {
  const std::size_t J = 8, N = 2000;
  RngStream rng(17);
  auto make = [&](std::size_t n) {
    Tensor x = Tensor::matrix(n, J);
    Tensor t = Tensor::matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double shift = rng.uniform(-2.0, 2.0);
      double s = 0.0;
      for (std::size_t j = 0; j < J; ++j) s += x(i, j) = shift + rng.normal();
      t(i, 0) = 2.0 * s / J;
    }
    return make_set(std::move(x), std::move(t));
  };
  const auto train_set = make(N);
  const auto test_set = make(500);
  nn::TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 50;
  cfg.learning_rate = 0.01;
  const auto net = nn::train(NetworkSpec{{J}, {LayerSpec::dense(1)}, 1}, train_set, cfg);
  const double mse = nn::mse_loss(nn::forward(net, test_set.inputs), test_set.targets);
  EXPECT_LT(mse, 0.01 * sample_variance(test_set.targets.values()));
  EXPECT_LT(net.loss_history.back(), net.loss_history.front());
}

TEST(Train, DeterministicGivenSeed) {
  RngStream rng(2);
  Tensor x = Tensor::matrix(64, 4), t = Tensor::matrix(64, 1);
  for (auto& v : x.values()) v = rng.normal();
  for (std::size_t i = 0; i < 64; ++i) t(i, 0) = x(i, 0) - x(i, 3);
  const auto data = make_set(x, t);
  nn::TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  cfg.seed = 99;
  const auto a = nn::train(NetworkSpec::mlp(4, 6, 1), data, cfg);
  const auto b = nn::train(NetworkSpec::mlp(4, 6, 1), data, cfg);
  EXPECT_EQ(a, b);
}

TEST(Train, TinyLearningRateLeavesWeights) {
  Tensor x = Tensor::from_rows({{1, 2}, {3, 4}});
  const auto data = make_set(x, Tensor::from_rows({{1}, {2}}));
  nn::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 1;
  cfg.learning_rate = 1e-300;
  cfg.seed = 4;
  const auto spec = NetworkSpec::mlp(2, 3, 1);
  const auto net = nn::train(spec, data, cfg);
  const auto init = nn::initialize(spec, cfg.seed);
  for (std::size_t t = 0; t < init.weights.size(); ++t) {
    for (std::size_t i = 0; i < init.weights[t].size(); ++i) {
      EXPECT_NEAR(net.weights[t][i], init.weights[t][i], 1e-250);
    }
  }
}

TEST(Train, DivergenceRaisesNonFiniteLoss) {
  Tensor x = Tensor::from_rows({{1e200, 1e200}});
  const auto data = make_set(x, Tensor::from_rows({{1e200}}));
  nn::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 1;
  try {
    nn::train(NetworkSpec::mlp(2, 3, 1), data, cfg);
    FAIL();
  } catch (const NonFiniteLossError& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteLoss);
    EXPECT_EQ(e.epoch(), 1u);
  }
}

TEST(Serialize, RoundTripIsBitExact) {
  const auto spec = NetworkSpec::cnn1d(20, {4, 4}, 3, 4, 2);
  auto net = nn::initialize(spec, 12);
  net.loss_history = {0.5, 0.25, 1.0 / 3.0};
  net.config.learning_rate = 0.003;
  const auto back = nn::from_json(nn::to_json(net));
  EXPECT_EQ(back, net);
  const auto dir = std::filesystem::path(ESTIM_TEST_TMP);
  std::filesystem::create_directories(dir);
  nn::save(net, dir / "net.json");
  EXPECT_EQ(nn::load(dir / "net.json"), net);
}

TEST(Serialize, MalformedDocumentThrows) {
  EXPECT_THROW(nn::from_json("{\"spec\": 3}"), Error);
}

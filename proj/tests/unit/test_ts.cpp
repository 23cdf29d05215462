#include <gtest/gtest.h>

#include <cmath>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"
#include "estim/simulators/univariate.hpp"
#include "estim/ts_replicate/replicate.hpp"

using namespace estim;
using namespace estim::ts;

namespace {

Tensor ramp(std::size_t T) {
  Tensor x({T});
  for (std::size_t t = 0; t < T; ++t) x[t] = double(t);
  return x;
}

SeriesSimulator ar1_simulator() {
  return {[](std::span<const double> th) {
            if (std::abs(th[0]) >= 1.0) throw Error(Errc::SimulatorDomainError, "rho outside (-1, 1)");
          },
          [](std::span<const double> th, std::size_t T, RngStream& rng) { return sim::sim_ar1(th[0], T, rng); }};
}

}  // namespace

TEST(Replicate, FiveExactCopies) {
  RngStream rng(1);
  const Tensor x = ramp(50);
  const auto r = replicate(x, 250, rng);
  EXPECT_EQ(r.plan.m, 5u);
  EXPECT_EQ(r.plan.r, 0u);
  ASSERT_EQ(r.series.size(), 250u);
  for (std::size_t t = 0; t < 250; ++t) EXPECT_EQ(r.series[t], x[t % 50]);
}

TEST(Replicate, EqualLengthIsIdentity) {
  RngStream rng(2);
  const Tensor x = ramp(40);
  const auto r = replicate(x, 40, rng);
  EXPECT_EQ(r.plan.m, 1u);
  EXPECT_EQ(r.plan.r, 0u);
  EXPECT_EQ(r.series.storage(), x.storage());
}

TEST(Replicate, RemainderIsContiguousBlock) {
  RngStream rng(3);
  const Tensor x = ramp(60);
  const auto r = replicate(x, 250, rng);
  EXPECT_EQ(r.plan.m, 4u);
  EXPECT_EQ(r.plan.r, 10u);
  ASSERT_EQ(r.series.size(), 250u);
  for (std::size_t t = 0; t < 240; ++t) EXPECT_EQ(r.series[t], x[t % 60]);
  EXPECT_LE(r.plan.offset + 10, 60u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(r.series[240 + k], double(r.plan.offset + k));
}

TEST(Replicate, LongerThanTrainingThrows) {
  RngStream rng(4);
  try {
    replicate(ramp(300), 250, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthError);
  }
}

TEST(Long, IdenticalChunksGiveChunkEstimate) {
  Tensor x({200});
  for (std::size_t t = 0; t < 200; ++t) x[t] = std::sin(0.3 * double(t % 100));
  const SeriesEstimator est = [](const Tensor& s) { return std::vector<double>{mean(s.values())}; };
  RngStream rng(5);
  const auto r = estimate_long(x, est, 100, rng);
  ASSERT_EQ(r.chunk_estimates.size(), 2u);
  EXPECT_DOUBLE_EQ(r.combined[0], r.chunk_estimates[0][0]);
}

TEST(Long, MeanOfChunkEstimates) {
  Tensor x({200});
  for (std::size_t t = 100; t < 200; ++t) x[t] = 1.0;
  const SeriesEstimator est = [](const Tensor& s) { return std::vector<double>{1.0 + mean(s.values())}; };
  RngStream rng(6);
  EXPECT_DOUBLE_EQ(estimate_long(x, est, 100, rng).combined[0], 1.5);
}

TEST(Long, ReplicatedTailChunk) {
  const SeriesEstimator est = [](const Tensor& s) {
    EXPECT_EQ(s.size(), 100u);
    return std::vector<double>{s[0]};
  };
  RngStream rng(7);
  const auto r = estimate_long(ramp(250), est, 100, rng);
  ASSERT_EQ(r.chunk_estimates.size(), 3u);
  EXPECT_EQ(r.plan.chunks, 3u);
  EXPECT_DOUBLE_EQ(r.combined[0], (0.0 + 100.0 + 200.0) / 3.0);
}

TEST(Rescale, HandValues) {
  EXPECT_DOUBLE_EQ(rescale_sd(0.3, 1), 0.3);
  EXPECT_NEAR(rescale_sd(0.0357, 5), 0.0798, 1e-4);
  EXPECT_DOUBLE_EQ(rescale_sd(0.1, 4), 0.2);
  EXPECT_DOUBLE_EQ(rescale_factor(50, 250), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(rescale_factor(250, 250), 1.0);
  EXPECT_DOUBLE_EQ(rescale_factor(500, 250), 1.0);
}

TEST(Ar1Mle, ClosedForm) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(ar1_mle(x), (2.0 + 6.0) / (1.0 + 4.0));
  EXPECT_THROW(ar1_mle(std::vector<double>{0.0, 0.0, 0.0}), Error);
}

TEST(EstimateAny, EqualLengthFactorOne) {
  const SeriesEstimator est = [](const Tensor& s) { return std::vector<double>{ar1_mle(s.values())}; };
  RngStream data(8);
  const Tensor x0 = sim::sim_ar1(0.5, 300, data);
  const auto r = estimate_any(x0, est, 300, ar1_simulator(), 200, RngStream(9));
  EXPECT_DOUBLE_EQ(r.theta_hat[0], ar1_mle(x0.values()));
  EXPECT_EQ(r.summary.rescale, 1.0);
  EXPECT_EQ(r.plan.m, 1u);
}

TEST(EstimateAny, ReplicatedEstimateNearOriginal) {
  const SeriesEstimator est = [](const Tensor& s) { return std::vector<double>{ar1_mle(s.values())}; };
  RngStream data(10);
  const Tensor x0 = sim::sim_ar1(0.9, 200, data);
  const auto r = estimate_any(x0, est, 1000, ar1_simulator(), 300, RngStream(11));
  EXPECT_EQ(r.plan.m, 5u);
  EXPECT_LT(std::abs(r.theta_hat[0] - ar1_mle(x0.values())), 2.0 * r.summary.sd[0]);
  EXPECT_NEAR(r.summary.sd[0] / std::sqrt((1 - 0.81) / 200.0), 1.0, 0.25);
}

TEST(EstimateAny, DeterministicAcrossCalls) {
  const SeriesEstimator est = [](const Tensor& s) { return std::vector<double>{ar1_mle(s.values())}; };
  RngStream data(12);
  const Tensor x0 = sim::sim_ar1(0.3, 130, data);
  const auto a = estimate_any(x0, est, 500, ar1_simulator(), 50, RngStream(13));
  const auto b = estimate_any(x0, est, 500, ar1_simulator(), 50, RngStream(13));
  EXPECT_EQ(a.summary, b.summary);
  EXPECT_EQ(a.plan, b.plan);
}

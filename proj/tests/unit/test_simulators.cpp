#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"
#include "estim/simulators/dataset_csv.hpp"
#include "estim/simulators/spatial.hpp"
#include "estim/simulators/univariate.hpp"

using namespace estim;
using namespace estim::sim;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an estim::Error";
  return Errc::InvalidArgument;
}

double frechet_cdf(double x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); }

}  // namespace

TEST(Gaussian, VanishingNoise) {
  RngStream rng(1);
  const Tensor x = sim_gaussian_iid(1.0, -30.0, 20, rng);
  for (double v : x.values()) EXPECT_NEAR(v, 1.0, 1e-5);
}

TEST(Gaussian, LogVarianceConcentrates) {
  RngStream rng(2);
  const Tensor x = sim_gaussian_iid(1.0, 1.0, 1000000, rng);
  EXPECT_NEAR(std::log(sample_variance(x.values())), 1.0, 0.01);
  EXPECT_NEAR(mean(x.values()), 1.0, 0.01);
}

TEST(Ar1, WhiteNoiseAtZero) {
  RngStream rng(3);
  const std::size_t T = 10000;
  const Tensor x = sim_ar1(0.0, T, rng);
  EXPECT_LT(std::abs(lag1_autocorrelation(x.values())), 4.0 / std::sqrt(double(T)));
}

TEST(Ar1, PersistentSeries) {
  RngStream rng(4);
  const Tensor x = sim_ar1(0.9, 100000, rng);
  EXPECT_NEAR(lag1_autocorrelation(x.values()), 0.9, 0.02);
  EXPECT_NEAR(sample_variance(x.values()) / (1.0 / 0.19), 1.0, 0.05);
}

TEST(Ar1, NonStationaryThrows) {
  RngStream rng(5);
  EXPECT_EQ(code_of([&] { sim_ar1(1.0, 10, rng); }), Errc::NonStationary);
  EXPECT_EQ(code_of([&] { sim_ar1(-1.2, 10, rng); }), Errc::NonStationary);
}

TEST(Svol, WhiteLatentAtZeroRho) {
  RngStream rng(6);
  const auto path = sim_svol_path({0.0, 6.0, 0.1}, 200000, rng, false);
  EXPECT_NEAR(sample_variance(path.h.values()) / 0.01, 1.0, 0.05);
}

TEST(Svol, StationaryLatentVariance) {
  RngStream rng(7);
  const auto path = sim_svol_path({0.8, 6.0, 0.1}, 1000000, rng, false);
  EXPECT_NEAR(sample_variance(path.h.values()) / (0.01 / (1 - 0.64)), 1.0, 0.05);
}

TEST(Svol, GaussianLimitOfNoise) {
  RngStream rng(8);
  const auto path = sim_svol_path({0.0, 1e6, 1e-8}, 1000000, rng, false);
  std::vector<double> eps(path.x.size());
  for (std::size_t t = 0; t < eps.size(); ++t) eps[t] = path.x[t] / std::exp(path.h[t] / 2);
  EXPECT_NEAR(excess_kurtosis(eps), 0.0, 0.1);
}

TEST(Svol, ScaledSeriesHasUnitVariance) {
  RngStream rng(9);
  const Tensor x = sim_svol({0.8, 6.0, 0.1}, 400000, rng, true);
  EXPECT_NEAR(sample_variance(x.values()), 1.0, 0.05);
}

TEST(Svol, InvalidParamsThrow) {
  RngStream rng(10);
  EXPECT_EQ(code_of([&] { sim_svol({0.8, 2.0, 0.1}, 10, rng); }), Errc::BadDof);
  EXPECT_EQ(code_of([&] { sim_svol({1.0, 6.0, 0.1}, 10, rng); }), Errc::NonStationary);
}

TEST(GaussianProcess, UnitVarianceAndCorrelation) {
  const Grid2D grid{4, 4, 1.0};
  GaussianProcessSampler gp(grid, {2.0, 1.0});
  RngStream rng(11);
  const std::size_t R = 10000;
  std::vector<double> a(R), b(R);
  for (std::size_t r = 0; r < R; ++r) {
    RngStream child = rng.derive(r);
    const Tensor f = gp.sample(child);
    a[r] = f[5];
    b[r] = f[6];
  }
  EXPECT_NEAR(sample_variance(a), 1.0, 0.05);
  EXPECT_NEAR(correlation(a, b), std::exp(-0.5), 0.05);
}

TEST(GaussianProcess, TinyRangeIsIndependent) {
  const Grid2D grid{3, 3, 1.0};
  RngStream rng(12);
  std::vector<double> a(5000), b(5000);
  for (std::size_t r = 0; r < a.size(); ++r) {
    const Tensor f = sim_gp(grid, {1e-3, 1.0}, rng);
    a[r] = f[0];
    b[r] = f[1];
  }
  EXPECT_NEAR(correlation(a, b), 0.0, 0.06);
}

TEST(BrownResnick, FrechetMarginAndMaxStability) {
  const Grid2D grid{8, 8, 1.0};
  const BrownResnickSimulator br({3.0, 1.0}, grid);
  const std::size_t R = 4000, site = 27;
  const RngStream root(17);
  std::vector<double> single(R), maxima(R);
  for (std::size_t r = 0; r < R; ++r) {
    RngStream rng = root.derive(r);
    single[r] = br.sample(rng)[site];
    double m = 0.0;
    for (int k = 0; k < 5; ++k) m = std::max(m, br.sample(rng)[site]);
    maxima[r] = m / 5.0;
  }
  EXPECT_GT(ks_test(single, frechet_cdf).p_value, 0.01);
  EXPECT_GT(ks_test(maxima, frechet_cdf).p_value, 0.01);
  EXPECT_EQ(br.budget_hits(), 0u);
}

TEST(BrownResnick, StrongerDependenceWithLargerRange) {
  const Grid2D grid{6, 6, 1.0};
  const RngStream root(14);
  auto concordance = [&](double lambda) {
    const BrownResnickSimulator br({lambda, 1.0}, grid);
    std::size_t both = 0;
    for (std::size_t r = 0; r < 2000; ++r) {
      RngStream rng = root.derive(r);
      const Tensor f = br.sample(rng);
      both += (f[0] > 1.0) == (f[1] > 1.0);
    }
    return double(both) / 2000.0;
  };
  EXPECT_GT(concordance(20.0), concordance(0.5));
}

TEST(BrownResnick, InvalidInputsThrow) {
  EXPECT_EQ(code_of([] { BrownResnickSimulator({-1.0, 1.0}, Grid2D{4, 4, 1.0}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { BrownResnickSimulator({1.0, 2.5}, Grid2D{4, 4, 1.0}); }), Errc::InvalidArgument);
  BrownResnickOptions small;
  small.max_sites = 10;
  EXPECT_EQ(code_of([&] { BrownResnickSimulator({1.0, 1.0}, Grid2D{4, 4, 1.0}, small); }), Errc::GridTooLarge);
}

TEST(Variogram, RecoversGpRange) {
  const Grid2D grid{30, 30, 1.0};
  GaussianProcessSampler gp(grid, {5.0, 1.0});
  const RngStream root(15);
  std::vector<Tensor> fields;
  for (std::size_t r = 0; r < 100; ++r) {
    RngStream rng = root.derive(r);
    fields.push_back(gp.sample(rng));
  }
  const auto fit = fit_powexp(grid, fields);
  EXPECT_NEAR(fit.alpha / 5.0, 1.0, 0.2);
}

TEST(Variogram, WhiteNoiseGivesNoRange) {
  const Grid2D grid{12, 12, 1.0};
  RngStream rng(16);
  std::vector<Tensor> fields;
  for (int r = 0; r < 20; ++r) fields.push_back(draw_normal(rng, grid.sites()).reshaped({12, 12}));
  const auto fit = fit_powexp(grid, fields);
  EXPECT_LT(powexp_correlation({fit.alpha, fit.eta}, grid.spacing), 0.05);
}

TEST(Variogram, ConstantFieldThrows) {
  const Grid2D grid{5, 5, 1.0};
  std::vector<Tensor> fields{Tensor({5, 5}, 2.0)};
  EXPECT_EQ(code_of([&] { fit_powexp(grid, fields); }), Errc::DegenerateField);
}

TEST(Variogram, GaussianizeIsRankPreserving) {
  std::vector<Tensor> fields{Tensor::vector({3.0, 100.0, 0.5, 7.0})};
  const auto z = gaussianize(fields);
  EXPECT_LT(z[0][2], z[0][0]);
  EXPECT_LT(z[0][0], z[0][3]);
  EXPECT_LT(z[0][3], z[0][1]);
  EXPECT_NEAR(z[0][0] + z[0][3], 0.0, 1e-12);
}

TEST(DatasetCsv, RoundTrip) {
  const auto dir = std::filesystem::path(ESTIM_TEST_TMP);
  std::filesystem::create_directories(dir);
  DatasetMeta meta;
  meta.model = "gauss-var";
  meta.params = {{"mu", 1.0}, {"log_var", 1.0 / 3.0}};
  meta.seed = 77;
  meta.shape = {2, 3};
  RngStream rng(1);
  std::vector<Tensor> reps{draw_normal(rng, 6).reshaped({2, 3}), draw_normal(rng, 6).reshaped({2, 3})};
  write_dataset_csv(dir / "ds.csv", meta, reps);
  const auto back = read_dataset_csv(dir / "ds.csv");
  EXPECT_EQ(back.meta.model, meta.model);
  EXPECT_EQ(back.meta.params, meta.params);
  EXPECT_EQ(back.meta.shape, meta.shape);
  ASSERT_EQ(back.replicates.size(), 2u);
  EXPECT_EQ(back.replicates[1], reps[1]);
}

TEST(DatasetCsv, MissingFileThrows) {
  EXPECT_EQ(code_of([] { read_dataset_csv("/nonexistent/dir/x.csv"); }), Errc::IoError);
}

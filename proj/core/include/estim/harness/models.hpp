#pragma once

#include <memory>
#include <string>
#include <vector>

#include "estim/sequential/model.hpp"
#include "estim/simulators/spatial.hpp"
#include "estim/simulators/univariate.hpp"
#include "estim/transforms/transforms.hpp"

namespace estim::harness {

/// Base for i.i.d. Gaussian samples. The network sees the order statistics
/// of the sample unless `sort_inputs` is off.
class IidModel : public seq::Model {
 public:
  IidModel(std::size_t J, bool sort_inputs) : J_(J), sort_inputs_(sort_inputs) {}

  std::vector<std::size_t> data_shape() const override { return {J_}; }
  Tensor featurize(const Tensor& raw) const override;

 protected:
  std::size_t J_;
  bool sort_inputs_;
};

/// N(mu, sigma^2) with mu known; theta = log(sigma^2).
class GaussVarModel : public IidModel {
 public:
  GaussVarModel(double mu, std::size_t J, bool sort_inputs = true);

  std::size_t param_dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"log_var"}; }
  void check_domain(std::span<const double> theta) const override;
  Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const override;

  /// log(sum (x - mu)^2 / J).
  std::vector<double> mle(const Tensor& x) const;

 private:
  double mu_;
};

/// N(mu, sigma^2); theta = (mu, t(sigma^2)) with t the log or the identity.
class GaussMeanVarModel : public IidModel {
 public:
  GaussMeanVarModel(std::size_t J, const tf::Transform& var_transform, bool sort_inputs = true);

  std::size_t param_dim() const override { return 2; }
  std::vector<std::string> param_names() const override;
  void check_domain(std::span<const double> theta) const override;
  Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const override;

  /// (mean, t(sum (x - mean)^2 / J)).
  std::vector<double> mle(const Tensor& x) const;

 private:
  const tf::Transform* var_;
};

/// N(mu, sigma^2) in moment coordinates: theta = (m1, m2) with
/// m2 = log(mu^2 + sigma^2) when `log_second` is set, else the raw second
/// moment mu^2 + sigma^2.
class GaussMomentsModel : public IidModel {
 public:
  GaussMomentsModel(std::size_t J, bool log_second, bool sort_inputs = true);

  std::size_t param_dim() const override { return 2; }
  std::vector<std::string> param_names() const override;
  void check_domain(std::span<const double> theta) const override;
  Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const override;

  std::vector<double> mle(const Tensor& x) const;
  bool log_second() const { return log_second_; }

 private:
  bool log_second_;
};

/// Brown-Resnick field on a square grid; theta = (log lambda, logit2 nu).
/// Network input is the log of the field.
class BrownResnickModel : public seq::Model {
 public:
  BrownResnickModel(const sim::Grid2D& grid, const sim::BrownResnickOptions& options = {});

  std::size_t param_dim() const override { return 2; }
  std::vector<std::string> param_names() const override { return {"log_lambda", "logit2_nu"}; }
  std::vector<std::size_t> data_shape() const override { return {grid_.ny, grid_.nx}; }
  void check_domain(std::span<const double> theta) const override;
  Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const override;
  Tensor featurize(const Tensor& raw) const override;
  seq::Sampler bind(std::span<const double> theta) const override;

  static sim::BrownResnickParams params_of(std::span<const double> theta);
  const sim::Grid2D& grid() const { return grid_; }

 private:
  sim::Grid2D grid_;
  sim::BrownResnickOptions options_;
};

/// Stochastic volatility series of fixed length with sigma held fixed;
/// theta = (fisher(rho), log-shift-2(nu)).
class SvolModel : public seq::Model {
 public:
  SvolModel(std::size_t T, double sigma, bool scaled);

  std::size_t param_dim() const override { return 2; }
  std::vector<std::string> param_names() const override { return {"fisher_rho", "log_nu_minus_2"}; }
  std::vector<std::size_t> data_shape() const override { return {T_}; }
  void check_domain(std::span<const double> theta) const override;
  Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const override;

  sim::SvolParams params_of(std::span<const double> theta) const;
  Tensor simulate_length(std::span<const double> theta, std::size_t T, RngStream& rng) const;

 private:
  std::size_t T_;
  double sigma_;
  bool scaled_;
};

/// Stationary AR(1) series; theta = t(rho) with t the identity or fisher.
class Ar1Model : public seq::Model {
 public:
  Ar1Model(std::size_t T, const tf::Transform& rho_transform);

  std::size_t param_dim() const override { return 1; }
  std::vector<std::string> param_names() const override;
  std::vector<std::size_t> data_shape() const override { return {T_}; }
  void check_domain(std::span<const double> theta) const override;
  Tensor simulate_raw(std::span<const double> theta, RngStream& rng) const override;

  Tensor simulate_length(std::span<const double> theta, std::size_t T, RngStream& rng) const;
  const tf::Transform& transform() const { return *rho_; }

 private:
  std::size_t T_;
  const tf::Transform* rho_;
};

}  // namespace estim::harness

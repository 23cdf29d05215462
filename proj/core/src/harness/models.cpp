#include "estim/harness/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"

namespace estim::harness {

namespace {

[[noreturn]] void reject(const std::string& model, std::span<const double> theta,
                         const std::string& why) {
  std::ostringstream os;
  os.precision(10);
  os << model << " at theta = (";
  for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
  os << "): " << why;
  throw Error(Errc::SimulatorDomainError, os.str());
}

void require_finite(const std::string& model, std::span<const double> theta, std::size_t P) {
  if (theta.size() != P) reject(model, theta, "wrong parameter count");
  for (double v : theta) {
    if (!std::isfinite(v)) reject(model, theta, "non-finite parameter");
  }
}

}  // namespace

Tensor IidModel::featurize(const Tensor& raw) const {
  Tensor out = raw;
  if (sort_inputs_) std::sort(out.values().begin(), out.values().end());
  return out;
}

GaussVarModel::GaussVarModel(double mu, std::size_t J, bool sort_inputs)
    : IidModel(J, sort_inputs), mu_(mu) {}

void GaussVarModel::check_domain(std::span<const double> theta) const {
  require_finite("gauss-var", theta, 1);
}

Tensor GaussVarModel::simulate_raw(std::span<const double> theta, RngStream& rng) const {
  return sim::sim_gaussian_iid(mu_, theta[0], J_, rng);
}

std::vector<double> GaussVarModel::mle(const Tensor& x) const {
  double s = 0.0;
  for (double v : x.values()) s += (v - mu_) * (v - mu_);
  return {std::log(s / static_cast<double>(x.size()))};
}

GaussMeanVarModel::GaussMeanVarModel(std::size_t J, const tf::Transform& var_transform,
                                     bool sort_inputs)
    : IidModel(J, sort_inputs), var_(&var_transform) {}

std::vector<std::string> GaussMeanVarModel::param_names() const {
  return {"mu", var_->name() == "identity" ? "var" : var_->name() + "_var"};
}

void GaussMeanVarModel::check_domain(std::span<const double> theta) const {
  require_finite("gauss-meanvar", theta, 2);
  const double v = var_->invert(theta[1]);
  if (!(v > 0.0) || !std::isfinite(v)) reject("gauss-meanvar", theta, "variance must be positive");
}

Tensor GaussMeanVarModel::simulate_raw(std::span<const double> theta, RngStream& rng) const {
  check_domain(theta);
  return sim::sim_gaussian_iid(theta[0], std::log(var_->invert(theta[1])), J_, rng);
}

std::vector<double> GaussMeanVarModel::mle(const Tensor& x) const {
  const double m = mean(x.values());
  double s = 0.0;
  for (double v : x.values()) s += (v - m) * (v - m);
  return {m, var_->apply(s / static_cast<double>(x.size()))};
}

GaussMomentsModel::GaussMomentsModel(std::size_t J, bool log_second, bool sort_inputs)
    : IidModel(J, sort_inputs), log_second_(log_second) {}

std::vector<std::string> GaussMomentsModel::param_names() const {
  return {"m1", log_second_ ? "log_m2" : "m2"};
}

void GaussMomentsModel::check_domain(std::span<const double> theta) const {
  require_finite("gauss-moments", theta, 2);
  const double second = log_second_ ? std::exp(theta[1]) : theta[1];
  if (!(second > theta[0] * theta[0])) {
    reject("gauss-moments", theta, "second moment must exceed the squared mean");
  }
}

Tensor GaussMomentsModel::simulate_raw(std::span<const double> theta, RngStream& rng) const {
  check_domain(theta);
  const double second = log_second_ ? std::exp(theta[1]) : theta[1];
  const double var = second - theta[0] * theta[0];
  return sim::sim_gaussian_iid(theta[0], std::log(var), J_, rng);
}

std::vector<double> GaussMomentsModel::mle(const Tensor& x) const {
  double s2 = 0.0;
  for (double v : x.values()) s2 += v * v;
  s2 /= static_cast<double>(x.size());
  return {mean(x.values()), log_second_ ? std::log(s2) : s2};
}

BrownResnickModel::BrownResnickModel(const sim::Grid2D& grid,
                                     const sim::BrownResnickOptions& options)
    : grid_(grid), options_(options) {
  grid.validate();
  if (grid.sites() > options.max_sites) {
    std::ostringstream os;
    os << "grid " << grid.nx << "x" << grid.ny << " exceeds " << options.max_sites << " sites";
    throw Error(Errc::GridTooLarge, os.str());
  }
}

sim::BrownResnickParams BrownResnickModel::params_of(std::span<const double> theta) {
  return {tf::log().invert(theta[0]), tf::logit2().invert(theta[1])};
}

void BrownResnickModel::check_domain(std::span<const double> theta) const {
  require_finite("brown-resnick", theta, 2);
  const auto p = params_of(theta);
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) {
    reject("brown-resnick", theta, "range must be positive and finite");
  }
  if (!(p.nu > 0.0 && p.nu <= 2.0)) reject("brown-resnick", theta, "smoothness outside (0, 2]");
}

Tensor BrownResnickModel::simulate_raw(std::span<const double> theta, RngStream& rng) const {
  check_domain(theta);
  return sim::BrownResnickSimulator(params_of(theta), grid_, options_).sample(rng);
}

Tensor BrownResnickModel::featurize(const Tensor& raw) const {
  Tensor out(raw.shape());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::log(raw[i]);
  return out;
}

seq::Sampler BrownResnickModel::bind(std::span<const double> theta) const {
  check_domain(theta);
  auto simulator =
      std::make_shared<const sim::BrownResnickSimulator>(params_of(theta), grid_, options_);
  return [this, simulator](RngStream& rng) { return featurize(simulator->sample(rng)); };
}

SvolModel::SvolModel(std::size_t T, double sigma, bool scaled)
    : T_(T), sigma_(sigma), scaled_(scaled) {}

sim::SvolParams SvolModel::params_of(std::span<const double> theta) const {
  return {tf::fisher().invert(theta[0]), tf::log_shift2().invert(theta[1]), sigma_};
}

void SvolModel::check_domain(std::span<const double> theta) const {
  require_finite("svol", theta, 2);
  const auto p = params_of(theta);
  if (!(std::abs(p.rho) < 1.0)) reject("svol", theta, "AR coefficient rounds to +-1");
  if (!(p.nu > 2.0) || !std::isfinite(p.nu)) reject("svol", theta, "degrees of freedom not in (2, inf)");
}

Tensor SvolModel::simulate_length(std::span<const double> theta, std::size_t T,
                                  RngStream& rng) const {
  check_domain(theta);
  return sim::sim_svol(params_of(theta), T, rng, scaled_);
}

Tensor SvolModel::simulate_raw(std::span<const double> theta, RngStream& rng) const {
  return simulate_length(theta, T_, rng);
}

Ar1Model::Ar1Model(std::size_t T, const tf::Transform& rho_transform)
    : T_(T), rho_(&rho_transform) {}

std::vector<std::string> Ar1Model::param_names() const {
  return {rho_->name() == "identity" ? "rho" : rho_->name() + "_rho"};
}

void Ar1Model::check_domain(std::span<const double> theta) const {
  require_finite("ar1", theta, 1);
  const double rho = rho_->invert(theta[0]);
  if (!(std::abs(rho) < 1.0)) reject("ar1", theta, "AR coefficient outside (-1, 1)");
}

Tensor Ar1Model::simulate_length(std::span<const double> theta, std::size_t T,
                                 RngStream& rng) const {
  check_domain(theta);
  return sim::sim_ar1(rho_->invert(theta[0]), T, rng);
}

Tensor Ar1Model::simulate_raw(std::span<const double> theta, RngStream& rng) const {
  return simulate_length(theta, T_, rng);
}

}  // namespace estim::harness

#include "estim/transforms/transforms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "estim/error.hpp"

namespace estim::tf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double id_fwd(double x) { return x; }
double log_fwd(double x) { return std::log(x); }
double log_inv(double y) { return std::exp(y); }
double logit2_fwd(double x) { return std::log(x / (2.0 - x)); }
double logit2_inv(double y) { return 2.0 / (1.0 + std::exp(-y)); }
double fisher_fwd(double x) { return std::log1p(x) - std::log1p(-x); }
double fisher_inv(double y) { return std::tanh(0.5 * y); }
double shift2_fwd(double x) { return std::log(x - 2.0); }
double shift2_inv(double y) { return 2.0 + std::exp(y); }

}  // namespace

Transform::Transform(std::string name, double lo, double hi, Fn forward, Fn inverse)
    : name_(std::move(name)), lo_(lo), hi_(hi), forward_(forward), inverse_(inverse) {}

double Transform::apply(double x) const {
  if (!in_domain(x)) throw DomainError(name_, x, lo_, hi_);
  return forward_(x);
}

double Transform::invert(double y) const {
  if (!std::isfinite(y)) throw DomainError(name_ + " inverse", y, -kInf, kInf);
  return inverse_(y);
}

const Transform& identity() {
  static const Transform t("identity", -kInf, kInf, id_fwd, id_fwd);
  return t;
}
const Transform& log() {
  static const Transform t("log", 0.0, kInf, log_fwd, log_inv);
  return t;
}
const Transform& logit2() {
  static const Transform t("logit2", 0.0, 2.0, logit2_fwd, logit2_inv);
  return t;
}
const Transform& fisher() {
  static const Transform t("fisher", -1.0, 1.0, fisher_fwd, fisher_inv);
  return t;
}
const Transform& log_shift2() {
  static const Transform t("log-shift-2", 2.0, kInf, shift2_fwd, shift2_inv);
  return t;
}

const Transform& by_id(std::string_view id) {
  if (id == "identity") return identity();
  if (id == "log") return log();
  if (id == "logit2") return logit2();
  if (id == "fisher") return fisher();
  if (id == "log-shift-2") return log_shift2();
  throw Error(Errc::ConfigError, "unknown transform id '" + std::string(id) + "'");
}

std::vector<std::string> registered_ids() {
  return {"identity", "log", "logit2", "fisher", "log-shift-2"};
}

std::array<double, 2> moment_map(double mu, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma2)) {
    std::ostringstream os;
    os << "moment map needs finite mu and sigma2 > 0, got (" << mu << ", " << sigma2 << ")";
    throw Error(Errc::InvalidMoments, os.str());
  }
  return {mu, std::log(mu * mu + sigma2)};
}

std::array<double, 2> moment_unmap(double m1, double m2) {
  const double second = std::exp(m2);
  const double sigma2 = second - m1 * m1;
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    std::ostringstream os;
    os << "moments (" << m1 << ", " << m2 << ") imply a non-positive variance";
    throw Error(Errc::InvalidMoments, os.str());
  }
  return {m1, sigma2};
}

}  // namespace estim::tf

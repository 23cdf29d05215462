#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace estim::tf {

/// Strictly increasing bijection from an open interval (lo, hi) onto the
/// real line. Networks are trained on the transformed (real-line) scale.
class Transform {
 public:
  using Fn = double (*)(double);

  Transform(std::string name, double lo, double hi, Fn forward, Fn inverse);

  const std::string& name() const { return name_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool in_domain(double x) const { return x > lo_ && x < hi_; }

  /// Throws DomainError unless lo < x < hi.
  double apply(double x) const;
  /// Throws DomainError for non-finite y.
  double invert(double y) const;

 private:
  std::string name_;
  double lo_, hi_;
  Fn forward_, inverse_;
};

const Transform& identity();
/// log(x) on (0, inf).
const Transform& log();
/// log(x / (2 - x)) on (0, 2); the generalized logit for smoothness in (0, 2].
const Transform& logit2();
/// log((1 + x) / (1 - x)) on (-1, 1).
const Transform& fisher();
/// log(x - 2) on (2, inf).
const Transform& log_shift2();

/// Lookup by id: "identity", "log", "logit2", "fisher", "log-shift-2".
/// Throws ConfigError for an unknown id.
const Transform& by_id(std::string_view id);
std::vector<std::string> registered_ids();

/// m1 = mu, m2 = log(mu^2 + sigma2). Throws InvalidMoments for sigma2 <= 0.
std::array<double, 2> moment_map(double mu, double sigma2);
/// Inverse of moment_map; throws InvalidMoments when exp(m2) <= m1^2.
std::array<double, 2> moment_unmap(double m1, double m2);

}  // namespace estim::tf

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "estim/core_math/rng.hpp"
#include "estim/core_math/tensor.hpp"

namespace estim::seq {

struct BootstrapSummary;

/// Per-coordinate sampling box on the transformed scale.
struct ParamBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const { return lo.size(); }
  /// Throws InvalidBounds unless every lo < hi and both are finite.
  void validate() const;
  bool contains(std::span<const double> theta) const;

  friend bool operator==(const ParamBounds&, const ParamBounds&) = default;
};

/// N x P matrix of independent uniforms, row by row.
Tensor sample_prior(const ParamBounds& bounds, std::size_t N, RngStream& rng);

/// Uniform on the part of the box where `accept` holds: rejected rows are
/// redrawn. Throws InvalidBounds when 1000 * N draws yield fewer than N
/// accepted rows.
Tensor sample_prior(const ParamBounds& bounds, std::size_t N, RngStream& rng,
                    const std::function<bool(std::span<const double>)>& accept);

enum class BoundsRule { Basic, Literal };

std::string to_string(BoundsRule rule);
BoundsRule bounds_rule_from_string(const std::string& name);

struct BoundsUpdate {
  ParamBounds bounds;
  std::vector<bool> widened;  // degeneracy guard fired for this coordinate
  bool degenerate = false;    // some coordinate had identical bootstrap samples
};

/// New sampling box from the bootstrap at theta_hat, with d = theta_hat - theta_b.
///
/// Basic: [theta_hat + Q_0.025(d), theta_hat + Q_0.975(d)], the basic
/// bootstrap interval.
/// Literal: [theta_hat + bias - Q_0.05(d), theta_hat + bias + Q_0.975(d)].
///
/// Guard (both rules): when a1 >= a2, or the bias-corrected centre
/// C = theta_hat + bias falls outside [a1, a2], the box is reset to C
/// +- max(2 S, eps) / 2.
BoundsUpdate update_bounds(std::span<const double> theta_hat, const BootstrapSummary& summary,
                           BoundsRule rule, double eps = 1e-6);

struct StopDecision {
  std::vector<bool> within;  // |bias_p| <= gamma S_p
  bool stop = false;
};

StopDecision stop_check(const BootstrapSummary& summary, double gamma);

}  // namespace estim::seq

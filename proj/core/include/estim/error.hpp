#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace estim {

enum class Errc {
  NotPositiveDefinite,
  EmptySample,
  InvalidBounds,
  ShapeMismatch,
  NonFiniteLoss,
  NonStationary,
  BadDof,
  GridTooLarge,
  DegenerateField,
  DomainError,
  InvalidMoments,
  SimulatorDomainError,
  LengthError,
  ConfigError,
  DegenerateInput,
  IoError,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every failure raised by the library. The code names the
/// failure class; the message carries the specifics.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Same code, with `context` prepended to the detail message.
  Error with_context(const std::string& context) const;

 private:
  Errc code_;
  std::string detail_;
};

class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(std::size_t epoch, double loss);

  std::size_t epoch() const noexcept { return epoch_; }
  double loss() const noexcept { return loss_; }

 private:
  std::size_t epoch_;
  double loss_;
};

/// Raised by parameter transforms when the argument lies outside the open
/// interval (lo, hi) the transform is defined on.
class DomainError : public Error {
 public:
  DomainError(std::string_view transform, double value, double lo, double hi);

  double value() const noexcept { return value_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double value_;
  double lo_;
  double hi_;
};

}  // namespace estim

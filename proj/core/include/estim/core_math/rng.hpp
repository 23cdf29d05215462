#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "estim/core_math/tensor.hpp"

namespace estim {

/// Seedable, splittable random stream (xoshiro256** core, SplitMix64 seeding).
///
/// A stream is identified by (seed, stream id). derive() produces child streams
/// whose identity depends only on the parent's identity and the child index,
/// never on how many draws the parent has made. Work split across threads
/// therefore reproduces single-threaded output exactly when each unit of work
/// draws from its own derived stream.
///
/// All variate generators are implemented here rather than through <random>
/// distributions so that draw sequences are identical across standard
/// libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  RngStream derive(std::uint64_t id) const;

  std::uint64_t next_u64() noexcept;

  // [0, 1) with 53 random bits.
  double uniform() noexcept;
  // [a, b); throws InvalidBounds when a >= b.
  double uniform(double a, double b);
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  double normal() noexcept;
  double exponential() noexcept;
  double gamma(double shape);
  double chi_square(double dof);
  // Standard (not variance-normalised) Student-t.
  double student_t(double dof);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

Tensor draw_normal(RngStream& rng, std::size_t n);
Tensor draw_uniform(RngStream& rng, double a, double b, std::size_t n);

}  // namespace estim

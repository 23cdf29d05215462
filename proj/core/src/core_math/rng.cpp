#include "estim/core_math/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "estim/error.hpp"

namespace estim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t mix(std::uint64_t x) noexcept {
  std::uint64_t s = x;
  return splitmix64(s);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t sm = seed ^ mix(stream ^ 0xD1B54A32D192ED03ULL);
  for (auto& word : state_) word = splitmix64(sm);
  // xoshiro must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

RngStream RngStream::derive(std::uint64_t id) const {
  return RngStream(seed_, mix(stream_ * kGolden + mix(id + 1)));
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
  if (!(a < b)) {
    std::ostringstream os;
    os << "uniform bounds require a < b, got (" << a << ", " << b << ")";
    throw Error(Errc::InvalidBounds, os.str());
  }
  const double v = a + (b - a) * uniform();
  // Rounding can land exactly on b for very narrow boxes.
  return v < b ? v : std::nextafter(b, a);
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "uniform_index requires n > 0");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RngStream::normal() noexcept {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(angle);
  has_spare_normal_ = true;
  return r * std::cos(angle);
}

double RngStream::exponential() noexcept { return -std::log(1.0 - uniform()); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(Errc::InvalidArgument, "gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double u = 1.0 - uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

double RngStream::student_t(double dof) {
  const double z = normal();
  return z / std::sqrt(chi_square(dof) / dof);
}

Tensor draw_normal(RngStream& rng, std::size_t n) {
  Tensor out({n});
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.normal();
  return out;
}

Tensor draw_uniform(RngStream& rng, double a, double b, std::size_t n) {
  if (!(a < b)) {
    std::ostringstream os;
    os << "draw_uniform requires a < b, got (" << a << ", " << b << ")";
    throw Error(Errc::InvalidBounds, os.str());
  }
  Tensor out({n});
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.uniform(a, b);
  return out;
}

}  // namespace estim

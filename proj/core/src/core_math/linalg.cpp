#include "estim/core_math/linalg.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "estim/error.hpp"

namespace estim {

namespace {

void require_square(const Tensor& a) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1) || a.dim(0) == 0) {
    throw Error(Errc::ShapeMismatch, "cholesky requires a non-empty square matrix");
  }
}

std::optional<Tensor> try_factor(const Tensor& a, double jitter) {
  const std::size_t n = a.dim(0);
  Tensor l = Tensor::matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double* lj = &l(j, 0);
    double pivot = a(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) pivot -= lj[k] * lj[k];
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return std::nullopt;
    const double diag = std::sqrt(pivot);
    l(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double* li = &l(i, 0);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s / diag;
    }
  }
  return l;
}

}  // namespace

Tensor cholesky(const Tensor& a) {
  require_square(a);
  const std::size_t n = a.dim(0);
  double trace = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trace += a(i, i);
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "matrix not symmetric at (" << i << ", " << j << ")";
        throw Error(Errc::InvalidArgument, os.str());
      }
    }
  }
  if (auto l = try_factor(a, 0.0)) return std::move(*l);
  const double jitter = 1e-10 * std::abs(trace) / static_cast<double>(n);
  if (jitter > 0.0) {
    if (auto l = try_factor(a, jitter)) return std::move(*l);
  }
  throw Error(Errc::NotPositiveDefinite, "non-positive pivot after diagonal jitter retry");
}

void lower_multiply(const Tensor& lower, std::span<const double> z, std::span<double> y) {
  const std::size_t n = lower.dim(0);
  const std::size_t m = y.size();
  if (m > n || z.size() < m) throw Error(Errc::ShapeMismatch, "lower_multiply dimensions");
  for (std::size_t i = 0; i < m; ++i) {
    const double* li = lower.data() + i * lower.dim(1);
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += li[k] * z[k];
    y[i] = s;
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw Error(Errc::ShapeMismatch, "matmul dimensions");
  }
  const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  Tensor c = Tensor::matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      for (std::size_t j = 0; j < m; ++j) c(i, j) += aip * b(p, j);
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw Error(Errc::ShapeMismatch, "transpose requires rank 2");
  Tensor t = Tensor::matrix(a.dim(1), a.dim(0));
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < a.dim(1); ++j) t(j, i) = a(i, j);
  return t;
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

}  // namespace estim

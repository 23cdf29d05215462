#pragma once

#include <span>

#include "estim/core_math/tensor.hpp"

namespace estim {

/// Lower Cholesky factor L with L * L^T == A.
///
/// A must be square and symmetric to 1e-10 relative. When a pivot is not
/// strictly positive the factorisation is retried once with
/// 1e-10 * trace(A) / n added to the diagonal; a second failure throws
/// NotPositiveDefinite.
Tensor cholesky(const Tensor& a);

/// y = L * z for lower-triangular L, using only the first rows of L when
/// y is shorter than L.
void lower_multiply(const Tensor& lower, std::span<const double> z, std::span<double> y);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
double frobenius_norm(const Tensor& a);

}  // namespace estim

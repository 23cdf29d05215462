#include "estim/core_math/tensor.hpp"

#include <cmath>
#include <sstream>

#include "estim/error.hpp"

namespace estim {

std::size_t shape_product(std::span<const std::size_t> shape) noexcept {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    std::ostringstream os;
    os << "shape product " << shape_product(shape_) << " != data length " << data_.size();
    throw Error(Errc::ShapeMismatch, os.str());
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  return Tensor({rows, cols}, fill);
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(Errc::ShapeMismatch, "ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw Error(Errc::ShapeMismatch, "axis out of range");
  return shape_[axis];
}

std::size_t Tensor::rows() const {
  if (shape_.empty()) throw Error(Errc::ShapeMismatch, "rank-0 tensor has no rows");
  return shape_[0];
}

std::size_t Tensor::row_size() const {
  if (shape_.empty()) throw Error(Errc::ShapeMismatch, "rank-0 tensor has no rows");
  return shape_product(std::span(shape_).subspan(1));
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t w = row_size();
  return std::span<double>(data_).subspan(r * w, w);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t w = row_size();
  return std::span<const double>(data_).subspan(r * w, w);
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor stack_rows(std::span<const Tensor> samples) {
  if (samples.empty()) throw Error(Errc::EmptySample, "cannot stack zero samples");
  const auto& inner = samples.front().shape();
  std::vector<std::size_t> shape{samples.size()};
  shape.insert(shape.end(), inner.begin(), inner.end());
  std::vector<double> data;
  data.reserve(samples.size() * samples.front().size());
  for (const auto& s : samples) {
    if (s.shape() != inner) throw Error(Errc::ShapeMismatch, "stack_rows: inconsistent sample shapes");
    data.insert(data.end(), s.storage().begin(), s.storage().end());
  }
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace estim

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace estim {

/// Dense row-major tensor of doubles. The first extent is treated as the
/// batch / row dimension by the row() accessors.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor vector(std::vector<double> values);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  // Rank-2 element access.
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * shape_[1] + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * shape_[1] + c];
  }

  std::size_t rows() const;
  std::size_t row_size() const;
  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;

  Tensor reshaped(std::vector<std::size_t> shape) const;
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::size_t shape_product(std::span<const std::size_t> shape) noexcept;

/// Stack equally shaped samples into a batch tensor with a leading row axis.
Tensor stack_rows(std::span<const Tensor> samples);

}  // namespace estim

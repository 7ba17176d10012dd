#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mvgt {

/// Dense row-major float64 array. Rank 1 and rank 2 are the common cases;
/// higher ranks are storable but only elementwise ops apply to them.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
  static Tensor vector(std::initializer_list<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  /// Leading dimension; 1 for a scalar-shaped tensor.
  std::size_t rows() const { return shape_.empty() ? 1 : shape_[0]; }
  /// Product of trailing dimensions; 1 for rank-1 tensors.
  std::size_t cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);
  /// this += s * other
  Tensor& axpy(double s, const Tensor& other);

  void fill(double v);
  Tensor reshaped(std::vector<std::size_t> shape) const;
  bool all_finite() const;
  double sum() const;
  double squared_norm() const;

  bool operator==(const Tensor& other) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(Tensor a, double s);
Tensor operator*(double s, Tensor a);

/// a[m x k] * b[k x n]
Tensor matmul(const Tensor& a, const Tensor& b);
/// a^T * b for a[k x m], b[k x n]
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// a * b^T for a[m x k], b[n x k]
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// Column sums of a rank-2 tensor.
Tensor column_sum(const Tensor& a);
/// Frobenius inner product.
double dot(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

/// Rows of `a` at the given indices.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index);
/// out[index[e]] += src[e]
void scatter_add_rows(Tensor& out, std::span<const std::size_t> index, const Tensor& src);
/// [a | b | ...] along columns; all parts need the same row count.
Tensor concat_cols(std::initializer_list<const Tensor*> parts);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);

std::string shape_string(const std::vector<std::size_t>& shape);
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace mvgt

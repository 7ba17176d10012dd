#include "mvgt/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mvgt/errors.hpp"

namespace mvgt {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void require_rank2(const Tensor& a, const char* what) {
  if (a.rank() != 2) {
    throw DimensionError(std::string(what) + ": expected a rank-2 tensor, got " +
                         shape_string(a.shape()));
  }
}

ConstMap as_matrix(const Tensor& a) {
  return ConstMap(a.data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (product(shape_) != data_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::size_t Tensor::cols() const {
  if (shape_.size() < 2) return 1;
  std::size_t c = 1;
  for (std::size_t i = 1; i < shape_.size(); ++i) c *= shape_[i];
  return c;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor& Tensor::axpy(double s, const Tensor& other) {
  require_same_shape(*this, other, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  return *this;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const { return Tensor(std::move(shape), data_); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Tensor::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(Tensor a, double s) { return a *= s; }
Tensor operator*(double s, Tensor a) { return a *= s; }

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  Tensor out({a.rows(), b.cols()});
  if (out.empty() || a.cols() == 0) return out;
  MutMap(out.data(), out.rows(), out.cols()).noalias() = as_matrix(a) * as_matrix(b);
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_tn");
  require_rank2(b, "matmul_tn");
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: " + shape_string(a.shape()) + "^T x " + shape_string(b.shape()));
  }
  Tensor out({a.cols(), b.cols()});
  if (out.empty() || a.rows() == 0) return out;
  MutMap(out.data(), out.rows(), out.cols()).noalias() = as_matrix(a).transpose() * as_matrix(b);
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_nt");
  require_rank2(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: " + shape_string(a.shape()) + " x " + shape_string(b.shape()) + "^T");
  }
  Tensor out({a.rows(), b.rows()});
  if (out.empty() || a.cols() == 0) return out;
  MutMap(out.data(), out.rows(), out.cols()).noalias() = as_matrix(a) * as_matrix(b).transpose();
  return out;
}

Tensor transpose(const Tensor& a) {
  require_rank2(a, "transpose");
  Tensor out({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor column_sum(const Tensor& a) {
  require_rank2(a, "column_sum");
  Tensor out({a.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j];
  }
  return out;
}

double dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index) {
  const std::size_t c = a.cols();
  Tensor out({index.size(), c});
  for (std::size_t e = 0; e < index.size(); ++e) {
    if (index[e] >= a.rows()) throw DimensionError("gather_rows: index out of range");
    std::copy_n(a.data() + index[e] * c, c, out.data() + e * c);
  }
  return out;
}

void scatter_add_rows(Tensor& out, std::span<const std::size_t> index, const Tensor& src) {
  const std::size_t c = out.cols();
  if (src.rows() != index.size() || (src.size() > 0 && src.cols() != c)) {
    throw DimensionError("scatter_add_rows: shape mismatch");
  }
  for (std::size_t e = 0; e < index.size(); ++e) {
    double* dst = out.data() + index[e] * c;
    const double* s = src.data() + e * c;
    for (std::size_t j = 0; j < c; ++j) dst[j] += s[j];
  }
}

Tensor concat_cols(std::initializer_list<const Tensor*> parts) {
  if (parts.size() == 0) return {};
  const std::size_t r = (*parts.begin())->rows();
  std::size_t total = 0;
  for (const Tensor* p : parts) {
    if (p->rows() != r) throw DimensionError("concat_cols: row count mismatch");
    total += p->cols();
  }
  Tensor out({r, total});
  for (std::size_t i = 0; i < r; ++i) {
    double* dst = out.data() + i * total;
    for (const Tensor* p : parts) {
      const std::size_t c = p->cols();
      std::copy_n(p->data() + i * c, c, dst);
      dst += c;
    }
  }
  return out;
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  if (begin > end || end > a.cols()) throw DimensionError("slice_cols: bad range");
  Tensor out({a.rows(), end - begin});
  for (std::size_t i = 0; i < a.rows(); ++i)
    std::copy(a.data() + i * a.cols() + begin, a.data() + i * a.cols() + end, out.data() + i * (end - begin));
  return out;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

}  // namespace mvgt

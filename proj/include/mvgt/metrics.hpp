#pragma once

#include <vector>

#include "mvgt/tensor.hpp"

namespace mvgt {

/// Per-target coefficient of determination for N x t predictions.
/// The baseline is the mean of `target` itself. Throws DomainError when
/// N < 2 or a target column is constant.
Tensor r_squared(const Tensor& pred, const Tensor& target);

/// Mean absolute error over all entries.
double mae(const Tensor& pred, const Tensor& target);
/// Mean squared error over all entries.
double mse(const Tensor& pred, const Tensor& target);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // 0 with fewer than two values
  std::size_t count = 0;
};

/// Sample mean and standard error (sample std / sqrt(n)).
MeanStderr mean_and_stderr(const std::vector<double>& values);

}  // namespace mvgt

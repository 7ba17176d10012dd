#pragma once

#include "mvgt/tensor.hpp"

namespace mvgt {

struct LossValue {
  double value = 0.0;
  Tensor grad;  // d value / d pred
};

/// Mean absolute error. The subgradient at a zero residual is 0.
LossValue l1_loss(const Tensor& pred, const Tensor& target);
/// Mean squared error.
LossValue mse_loss(const Tensor& pred, const Tensor& target);

}  // namespace mvgt

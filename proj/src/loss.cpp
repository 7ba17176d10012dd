#include "mvgt/loss.hpp"

#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt {

namespace {

void check(const Tensor& pred, const Tensor& target, const char* name) {
  require_same_shape(pred, target, name);
  if (pred.empty()) throw DomainError(std::string(name) + ": empty input");
}

}  // namespace

LossValue l1_loss(const Tensor& pred, const Tensor& target) {
  check(pred, target, "l1_loss");
  const double n = static_cast<double>(pred.size());
  LossValue out{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - target[i];
    out.value += std::abs(r);
    out.grad[i] = r > 0.0 ? 1.0 / n : (r < 0.0 ? -1.0 / n : 0.0);
  }
  out.value /= n;
  return out;
}

LossValue mse_loss(const Tensor& pred, const Tensor& target) {
  check(pred, target, "mse_loss");
  const double n = static_cast<double>(pred.size());
  LossValue out{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - target[i];
    out.value += r * r;
    out.grad[i] = 2.0 * r / n;
  }
  out.value /= n;
  return out;
}

}  // namespace mvgt

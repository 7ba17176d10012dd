#include "mvgt/metrics.hpp"

#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt {

Tensor r_squared(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "r_squared");
  const std::size_t n = target.rank() == 1 ? target.size() : target.shape()[0];
  if (n < 2) throw DomainError("r_squared: need at least two samples");
  const std::size_t t = target.size() / n;
  Tensor out({t});
  for (std::size_t c = 0; c < t; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += target.data()[i * t + c];
    mean /= static_cast<double>(n);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = target.data()[i * t + c];
      const double r = pred.data()[i * t + c] - y;
      ss_res += r * r;
      ss_tot += (y - mean) * (y - mean);
    }
    if (!(ss_tot > 0.0)) throw DomainError("r_squared: target " + std::to_string(c) + " is constant");
    out[c] = 1.0 - ss_res / ss_tot;
  }
  return out;
}

double mae(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mae");
  if (target.size() == 0) throw DomainError("mae: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) s += std::abs(pred.data()[i] - target.data()[i]);
  return s / static_cast<double>(target.size());
}

double mse(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse");
  if (target.size() == 0) throw DomainError("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double r = pred.data()[i] - target.data()[i];
    s += r * r;
  }
  return s / static_cast<double>(target.size());
}

MeanStderr mean_and_stderr(const std::vector<double>& values) {
  MeanStderr out;
  out.count = values.size();
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  out.stderr_ = sd / std::sqrt(static_cast<double>(values.size()));
  return out;
}

}  // namespace mvgt

#include "mvgt/optim.hpp"

#include <algorithm>
#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt {

std::string to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "adamw"; }

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "adamw") return OptimizerKind::AdamW;
  throw ConfigError("unknown optimizer '" + name + "'");
}

Optimizer::Optimizer(OptimizerConfig config, ParamList params) : config_(config), params_(std::move(params)) {
  if (!(config_.lr > 0.0)) throw ConfigError("learning rate must be positive");
  first_.reserve(params_.size());
  second_.reserve(params_.size());
  for (const Param* p : params_) {
    first_.emplace_back(p->value.shape());
    second_.emplace_back(p->value.shape());
  }
}

void Optimizer::step() {
  for (const Param* p : params_) {
    if (p->grad.shape() != p->value.shape()) throw DimensionError("optimizer: gradient shape mismatch");
    if (!p->grad.all_finite()) throw NumericError("optimizer: non-finite gradient, step rejected");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  const bool decoupled = config_.kind == OptimizerKind::AdamW;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& theta = params_[k]->value;
    const Tensor& grad = params_[k]->grad;
    Tensor& m = first_[k];
    Tensor& v = second_[k];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double g = grad[i];
      if (decoupled) {
        theta[i] -= config_.lr * config_.weight_decay * theta[i];
      } else {
        g += config_.weight_decay * theta[i];
      }
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

double PlateauScheduler::step(double metric) {
  if (metric < best) {
    best = metric;
    idle = 0;
    return lr;
  }
  if (++idle >= patience) {
    lr = std::max(floor, lr * factor);
    idle = 0;
  }
  return lr;
}

}  // namespace mvgt

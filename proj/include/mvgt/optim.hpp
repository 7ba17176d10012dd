#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mvgt/mlp.hpp"

namespace mvgt {

enum class OptimizerKind { Adam, AdamW };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Adam adds weight_decay * theta to the gradient; AdamW decays the weights directly.
  double weight_decay = 0.0;
};

/// Adam / AdamW over a fixed list of parameters. Moments are allocated on
/// construction and keep the parameter shapes.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, ParamList params);

  /// Applies one update from the current gradients. Throws NumericError and
  /// leaves every parameter untouched if any gradient is non-finite.
  void step();

  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  std::uint64_t step_count() const { return steps_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  ParamList params_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  std::uint64_t steps_ = 0;
};

/// Reduce-on-plateau learning rate decay.
struct PlateauScheduler {
  double lr = 5e-3;
  double factor = 0.8;
  int patience = 5;
  double floor = 1e-5;
  double best = std::numeric_limits<double>::infinity();
  int idle = 0;

  /// Feeds one epoch's metric (lower is better) and returns the new lr.
  double step(double metric);
};

}  // namespace mvgt

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvgt/config.hpp"
#include "mvgt/dataset.hpp"
#include "mvgt/network.hpp"
#include "mvgt/seeding.hpp"

namespace mvgt {

/// Graph construction and featurization for one sample:
/// molecules get binary-expanded Coulomb features on threshold views,
/// point clouds get a constant node feature and RBF distances on radius views.
GraphInput build_input(const Sample& s, const ExperimentConfig& config);
std::vector<GraphInput> build_inputs(const std::vector<Sample>& samples, const ExperimentConfig& config);

NetworkSpec network_spec_for(const ExperimentConfig& config, std::size_t targets);

/// Per-target affine standardization fitted on training targets.
struct TargetScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static TargetScaler identity(std::size_t t);
  /// Scale is the population std, or 1 for a constant column.
  static TargetScaler fit(const std::vector<Sample>& samples, const std::vector<std::size_t>& idx);
  Tensor to_model(const Tensor& raw) const;
  Tensor to_raw(const Tensor& model) const;

  nlohmann::json to_json() const;
  static TargetScaler from_json(const nlohmann::json& j);
};

struct FitOptions {
  LossKind loss = LossKind::L1;
  OptimizerConfig optimizer{};
  double scheduler_factor = 0.8;
  int scheduler_patience = 5;
  double scheduler_floor = 1e-5;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 1000;
  std::size_t early_stop_patience = 20;  // 0 disables early stopping
  /// Stop as soon as the epoch metric falls below this value.
  std::optional<double> target_loss;
  std::uint64_t seed = 0;

  static FitOptions from_config(const ExperimentConfig& c);
};

struct EpochRecord {
  std::size_t epoch = 0;   // 1-based
  double train_loss = 0.0;  // running mean over the epoch's mini-batches
  double metric = 0.0;      // loss on the validation set, or on the training set when it is empty
  double lr = 0.0;
};

struct FitResult {
  std::vector<EpochRecord> curve;
  std::size_t best_epoch = 0;  // 0 when untrained
  double best_metric = 0.0;
  std::size_t epochs_run = 0;
  /// "untrained", "max_epochs", "early_stop" or "target_reached".
  std::string stop_reason = "untrained";
};

/// Mean loss of `net` over the listed samples (targets in model space).
double evaluate_loss(const Network& net, const std::vector<GraphInput>& inputs, const std::vector<Tensor>& targets,
                     const std::vector<std::size_t>& idx, LossKind loss);

/// Mini-batch training with plateau learning-rate decay, early stopping on
/// the epoch metric and restoration of the best parameters. `targets` are
/// already in model space. Throws DivergenceError on a non-finite loss.
FitResult fit(Network& net, const std::vector<GraphInput>& inputs, const std::vector<Tensor>& targets,
              const std::vector<std::size_t>& train_idx, const std::vector<std::size_t>& val_idx,
              const FitOptions& opts);

/// Least-squares coefficients c minimizing sum_s ||sum_k c_k B_k x_s - y_s||^2.
std::vector<double> fit_linear_filter(const std::vector<theory::Matrix>& basis, const std::vector<FilterSample>& data,
                                      const std::vector<std::size_t>& idx);
/// Mean over samples of ||sum_k c_k B_k x - y||^2.
double linear_filter_mse(const std::vector<theory::Matrix>& basis, const std::vector<double>& coeffs,
                         const std::vector<FilterSample>& data, const std::vector<std::size_t>& idx);

struct TrainOutcome {
  nlohmann::json model;
  nlohmann::json report;
  std::string csv;
};

/// Runs the task's protocol: stratified k-fold for molecules, seeded 60/20/20
/// repeats for point clouds, and least-squares fits of the tied dense-graph
/// and graph-tuple filter classes over seeded 80/20 splits for planted
/// filters. The returned model is the one with the best validation metric.
TrainOutcome train(const ExperimentConfig& config, const Dataset& data);

struct EvalOutcome {
  nlohmann::json report;
};

/// Scores a saved model on a dataset (raw target units).
EvalOutcome evaluate_model(const nlohmann::json& model, const Dataset& data);

}  // namespace mvgt

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "mvgt/optim.hpp"

namespace mvgt {

enum class Task { Molecule, PointCloud, PlantedFilter };
enum class ModelKind { SingleGraph, GraphTuple };
enum class LossKind { L1, Mse };

std::string to_string(Task t);
Task task_from_string(const std::string& name);
std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& name);
std::string to_string(LossKind l);

/// Declarative description of one experiment. Defaults follow the molecular
/// protocol (Adam, L1, width 100, two layers, batch 128, plateau factor 0.8)
/// or the point-cloud protocol (AdamW, MSE, width 96, three layers, batch 8,
/// plateau factor 0.7) depending on the task.
struct ExperimentConfig {
  Task task = Task::Molecule;
  ModelKind model = ModelKind::GraphTuple;

  // molecule: views split at `threshold`; the single-graph baseline keeps X_ij >= threshold
  double threshold = 2.0;
  // point cloud: view 1 d <= c1, view 2 c1 < d <= c2
  double c1 = 1.5;
  double c2 = 3.0;
  bool ratio_mode = true;  // enforce c2 = 2 c1
  /// Radius used by the single-graph point-cloud baseline: "c1" (strong) or "c2" (dense).
  std::string single_radius = "c1";

  std::size_t hidden = 100;
  std::size_t layers = 2;
  std::size_t feature_dim = 100;  // binary expansion width
  std::size_t rbf_dim = 32;

  LossKind loss = LossKind::L1;
  OptimizerConfig optimizer{};
  double scheduler_factor = 0.8;
  int scheduler_patience = 5;
  double scheduler_floor = 1e-5;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 1000;
  /// Idle epochs before early stopping; 0 runs to max_epochs.
  std::size_t early_stop_patience = 20;
  bool standardize_targets = true;

  std::size_t folds = 10;     // molecule: stratified k-fold
  std::size_t strat_bins = 10;
  std::size_t repeats = 10;   // point cloud and planted filter: seeded repeats
  std::uint64_t seed = 0;

  int filter_degree = 2;      // planted filter: polynomial degree m

  static ExperimentConfig defaults_for(Task task);
  /// Overlays the fields present in `j` on the defaults of `j["task"]`.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

}  // namespace mvgt

#include "mvgt/config.hpp"

#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt {

using nlohmann::json;

std::string to_string(Task t) {
  switch (t) {
    case Task::Molecule:
      return "molecule";
    case Task::PointCloud:
      return "pointcloud";
    case Task::PlantedFilter:
      return "planted-filter";
  }
  return "?";
}

Task task_from_string(const std::string& name) {
  if (name == "molecule") return Task::Molecule;
  if (name == "pointcloud") return Task::PointCloud;
  if (name == "planted-filter") return Task::PlantedFilter;
  throw ConfigError("unknown task '" + name + "' (expected molecule, pointcloud or planted-filter)");
}

std::string to_string(ModelKind m) { return m == ModelKind::GraphTuple ? "graph-tuple" : "single-graph"; }

ModelKind model_from_string(const std::string& name) {
  if (name == "graph-tuple") return ModelKind::GraphTuple;
  if (name == "single-graph") return ModelKind::SingleGraph;
  throw ConfigError("unknown model '" + name + "' (expected graph-tuple or single-graph)");
}

std::string to_string(LossKind l) { return l == LossKind::L1 ? "l1" : "mse"; }

ExperimentConfig ExperimentConfig::defaults_for(Task task) {
  ExperimentConfig c;
  c.task = task;
  if (task == Task::PointCloud) {
    c.hidden = 96;
    c.layers = 3;
    c.loss = LossKind::Mse;
    c.optimizer.kind = OptimizerKind::AdamW;
    c.optimizer.lr = 5e-4;
    c.optimizer.weight_decay = 1e-5;
    c.scheduler_factor = 0.7;
    c.batch_size = 8;
    c.max_epochs = 300;
    c.early_stop_patience = 0;
  } else {
    c.optimizer.kind = OptimizerKind::Adam;
    c.optimizer.lr = 5e-3;
    c.optimizer.weight_decay = 1e-5;
  }
  if (task == Task::PlantedFilter) c.repeats = 5;
  return c;
}

namespace {

template <typename T>
void overlay(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("task")) throw ConfigError("config: missing field 'task'");
  ExperimentConfig c = defaults_for(task_from_string(j.at("task").get<std::string>()));
  try {
    if (j.contains("model")) c.model = model_from_string(j.at("model").get<std::string>());
    overlay(j, "threshold", c.threshold);
    if (j.contains("radii")) {
      const json& r = j.at("radii");
      overlay(r, "c1", c.c1);
      overlay(r, "c2", c.c2);
      overlay(r, "ratio_mode", c.ratio_mode);
      if (c.ratio_mode && !r.contains("c2")) c.c2 = 2.0 * c.c1;
    }
    overlay(j, "single_radius", c.single_radius);
    overlay(j, "hidden", c.hidden);
    overlay(j, "layers", c.layers);
    overlay(j, "feature_dim", c.feature_dim);
    overlay(j, "rbf_dim", c.rbf_dim);
    if (j.contains("loss")) {
      const auto l = j.at("loss").get<std::string>();
      if (l != "l1" && l != "mse") throw ConfigError("unknown loss '" + l + "'");
      c.loss = l == "l1" ? LossKind::L1 : LossKind::Mse;
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      if (o.contains("kind")) c.optimizer.kind = optimizer_from_string(o.at("kind").get<std::string>());
      overlay(o, "lr", c.optimizer.lr);
      overlay(o, "weight_decay", c.optimizer.weight_decay);
      overlay(o, "beta1", c.optimizer.beta1);
      overlay(o, "beta2", c.optimizer.beta2);
      overlay(o, "eps", c.optimizer.eps);
    }
    if (j.contains("scheduler")) {
      const json& s = j.at("scheduler");
      overlay(s, "factor", c.scheduler_factor);
      overlay(s, "patience", c.scheduler_patience);
      overlay(s, "floor", c.scheduler_floor);
    }
    overlay(j, "batch_size", c.batch_size);
    overlay(j, "max_epochs", c.max_epochs);
    overlay(j, "early_stop_patience", c.early_stop_patience);
    overlay(j, "standardize_targets", c.standardize_targets);
    overlay(j, "folds", c.folds);
    overlay(j, "strat_bins", c.strat_bins);
    overlay(j, "repeats", c.repeats);
    overlay(j, "seed", c.seed);
    overlay(j, "filter_degree", c.filter_degree);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  return json{{"task", to_string(task)},
              {"model", to_string(model)},
              {"threshold", threshold},
              {"radii", {{"c1", c1}, {"c2", c2}, {"ratio_mode", ratio_mode}}},
              {"single_radius", single_radius},
              {"hidden", hidden},
              {"layers", layers},
              {"feature_dim", feature_dim},
              {"rbf_dim", rbf_dim},
              {"loss", to_string(loss)},
              {"optimizer",
               {{"kind", to_string(optimizer.kind)},
                {"lr", optimizer.lr},
                {"weight_decay", optimizer.weight_decay},
                {"beta1", optimizer.beta1},
                {"beta2", optimizer.beta2},
                {"eps", optimizer.eps}}},
              {"scheduler", {{"factor", scheduler_factor}, {"patience", scheduler_patience}, {"floor", scheduler_floor}}},
              {"batch_size", batch_size},
              {"max_epochs", max_epochs},
              {"early_stop_patience", early_stop_patience},
              {"standardize_targets", standardize_targets},
              {"folds", folds},
              {"strat_bins", strat_bins},
              {"repeats", repeats},
              {"seed", seed},
              {"filter_degree", filter_degree}};
}

void ExperimentConfig::validate() const {
  if (hidden == 0 || layers == 0 || batch_size == 0 || folds == 0 || repeats == 0 || strat_bins == 0 ||
      feature_dim < 3 || rbf_dim < 2) {
    throw ConfigError("config: widths and counts must be positive");
  }
  if (task == Task::PointCloud) {
    if (!(c1 > 0.0) || !(c2 > c1)) throw ConfigError("config: need 0 < c1 < c2");
    if (ratio_mode && std::abs(c2 - 2.0 * c1) > 1e-12 * c1) {
      throw ConfigError("config: ratio mode requires c2 = 2 c1");
    }
    if (single_radius != "c1" && single_radius != "c2") throw ConfigError("config: single_radius must be c1 or c2");
  }
  if (task == Task::Molecule && folds < 2) throw ConfigError("config: cross-validation needs at least 2 folds");
  if (filter_degree < 0) throw ConfigError("config: filter_degree must be non-negative");
  if (!(optimizer.lr > 0.0)) throw ConfigError("config: learning rate must be positive");
  if (!(scheduler_factor > 0.0 && scheduler_factor <= 1.0)) throw ConfigError("config: scheduler factor must be in (0, 1]");
}

}  // namespace mvgt

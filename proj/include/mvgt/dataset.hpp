#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvgt/tensor.hpp"
#include "mvgt/theory.hpp"

namespace mvgt {

/// A molecule (charges present) or a point cloud (charges absent).
struct Sample {
  std::optional<Tensor> charges;
  Tensor positions;  // n x 3
  Tensor targets;    // t

  bool operator==(const Sample&) const = default;
};

/// One (x, y) pair of the planted linear-filter problem.
struct FilterSample {
  Tensor x;
  Tensor y;

  bool operator==(const FilterSample&) const = default;
};

/// Ground truth of a planted-filter dataset:
/// M* = sum_k q_k (S1 + S2)^k + alpha [S1, S2].
struct PlantedProblem {
  theory::ShiftPair shifts;
  theory::Matrix sigma;
  std::vector<double> q;
  double alpha = 0.0;
  double noise_var = 0.0;
  int degree = 2;
  double analytic_gap = 0.0;

  theory::Matrix oracle() const;
};

struct Dataset {
  std::vector<Sample> samples;
  std::optional<PlantedProblem> planted;
  std::vector<FilterSample> filter_samples;
  std::vector<std::string> warnings;

  std::size_t size() const { return planted ? filter_samples.size() : samples.size(); }
};

nlohmann::json sample_to_json(const Sample& s);
nlohmann::json planted_to_json(const PlantedProblem& p);

/// Reads line-delimited JSON. Each line is a molecule record
/// {"charges", "positions", "targets"}, a point-cloud record
/// {"positions", "targets"}, a planted-filter header {"planted": {...}} or a
/// planted sample {"x", "y"}. Blank lines are skipped. Malformed lines raise
/// ParseError and missing fields SchemaError, both prefixed with "line N".
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(const std::string& text);

void save_dataset(const Dataset& data, const std::string& path);
std::string serialize_dataset(const Dataset& data);

}  // namespace mvgt

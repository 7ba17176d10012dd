#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "mvgt/theory_suite.hpp"

namespace mvgt {

// Implementations of the `mvgt` subcommands. Each returns the process exit
// code: 0 on success, 1 when a check fails. Errors are thrown as mvgt::Error.

struct GenDataOptions {
  std::string task = "molecule";
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t points = 32;  // point clouds only
  std::size_t size = 6;     // planted filter: shift operator size
};
int cmd_gen_data(const GenDataOptions& opts, std::ostream& log);

struct TrainOptions {
  std::string config;
  std::string data;
  std::string out;  // directory for report.json, metrics.csv and model.json
};
int cmd_train(const TrainOptions& opts, std::ostream& log);

struct EvalOptions {
  std::string model;
  std::string data;
};
int cmd_eval(const EvalOptions& opts, std::ostream& log);

struct GradcheckOptions {
  std::string layer = "all";
  std::uint64_t seed = 0;
  double tol = 1e-5;
  std::size_t instances = 20;
  std::string out;  // optional JSON report; a CSV is written next to it
};
int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& log);

struct VerifyTheoryOptions {
  theory::SuiteOptions suite;
  std::string out;  // optional JSON report; a CSV is written next to it
};
int cmd_verify_theory(const VerifyTheoryOptions& opts, std::ostream& log);

/// Path with its extension replaced by ".csv".
std::string csv_sibling(const std::string& json_path);

}  // namespace mvgt

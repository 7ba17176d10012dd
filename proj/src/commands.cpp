#include "mvgt/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvgt/config.hpp"
#include "mvgt/dataset.hpp"
#include "mvgt/errors.hpp"
#include "mvgt/layer_checks.hpp"
#include "mvgt/synthetic.hpp"
#include "mvgt/trainer.hpp"

namespace mvgt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_sibling(const std::string& json_path) {
  fs::path p(json_path);
  p.replace_extension(".csv");
  return p.string();
}

int cmd_gen_data(const GenDataOptions& o, std::ostream& log) {
  if (o.out.empty()) throw ConfigError("gen-data: --out is required");
  if (o.count == 0) throw ConfigError("gen-data: --count must be positive");
  const Task task = task_from_string(o.task);
  Dataset data;
  switch (task) {
    case Task::Molecule:
      data.samples = generate_synthetic_molecules(o.count, o.seed);
      break;
    case Task::PointCloud: {
      CloudGenOptions c;
      c.points = o.points;
      data.samples = generate_point_clouds(o.count, o.seed, c);
      break;
    }
    case Task::PlantedFilter: {
      const PlantedProblem p = random_planted_problem(o.size, o.seed);
      data = generate_planted_filter_dataset(p.shifts, p.q, p.alpha, p.sigma, p.noise_var, o.count,
                                             derive_seed(o.seed, 1), p.degree);
      break;
    }
  }
  write_file(o.out, serialize_dataset(data));
  log << "wrote " << data.size() << " " << to_string(task) << " samples to " << o.out << "\n";
  if (data.planted) log << "analytic gap " << fmt(data.planted->analytic_gap) << "\n";
  return 0;
}

int cmd_train(const TrainOptions& o, std::ostream& log) {
  if (o.config.empty() || o.data.empty() || o.out.empty()) {
    throw ConfigError("train: --config, --data and --out are required");
  }
  const ExperimentConfig config = ExperimentConfig::from_json(parse_json_file(o.config));
  const Dataset data = load_dataset(o.data);
  for (const std::string& w : data.warnings) log << "warning: " << w << "\n";
  const TrainOutcome out = train(config, data);
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  write_file((dir / "report.json").string(), out.report.dump(2) + "\n");
  write_file((dir / "metrics.csv").string(), out.csv);
  write_file((dir / "model.json").string(), out.model.dump() + "\n");

  const json& summary = out.report.at("summary");
  if (config.task == Task::PlantedFilter) {
    const bool pass = summary.at("all_pass").get<bool>();
    log << (pass ? "PASS" : "FAIL") << " graph-tuple filter beats the dense-graph filter by >= half the analytic gap "
        << fmt(out.report.at("analytic_gap").get<double>()) << " (mean observed "
        << fmt(summary.at("observed_gap").at("mean").get<double>()) << ")\n";
    log << "report written to " << o.out << "\n";
    return pass ? 0 : 1;
  }
  const json& m = summary.at("test_mae");
  log << "test MAE " << fmt(m.at("mean").get<double>());
  if (!m.at("stderr").is_null()) log << " +- " << fmt(m.at("stderr").get<double>());
  log << " over " << m.at("count").get<std::size_t>() << " runs (" << out.report.at("status").get<std::string>()
      << ")\nreport written to " << o.out << "\n";
  return 0;
}

int cmd_eval(const EvalOptions& o, std::ostream& log) {
  if (o.model.empty() || o.data.empty()) throw ConfigError("eval: --model and --data are required");
  const json model = parse_json_file(o.model);
  const Dataset data = load_dataset(o.data);
  const EvalOutcome out = evaluate_model(model, data);
  log << out.report.dump(2) << "\n";
  return 0;
}

int cmd_gradcheck(const GradcheckOptions& o, std::ostream& log) {
  if (!(o.tol > 0.0)) throw ConfigError("gradcheck: --tol must be positive");
  if (o.instances == 0) throw ConfigError("gradcheck: --instances must be positive");
  std::vector<LayerKind> layers;
  if (o.layer == "all") {
    layers = {LayerKind::GineConv, LayerKind::Egcl, LayerKind::GineGt, LayerKind::EgnnGt};
  } else {
    layers = {layer_from_string(o.layer)};
  }
  bool pass = true;
  json results = json::array();
  std::string csv = "layer,instance,seed,nodes,hidden,checked,max_rel_error,pass\n";
  for (LayerKind kind : layers) {
    double worst = 0.0;
    for (std::size_t t = 0; t < o.instances; ++t) {
      const std::uint64_t seed = derive_seed(o.seed, t);
      const LayerCheckResult r = check_layer_gradients(kind, seed);
      const bool ok = r.max_rel_error < o.tol;
      pass = pass && ok;
      worst = std::max(worst, r.max_rel_error);
      results.push_back(json{{"layer", to_string(kind)},
                             {"instance", t},
                             {"seed", seed},
                             {"nodes", r.nodes},
                             {"hidden", r.hidden},
                             {"checked", r.checked},
                             {"max_rel_error", r.max_rel_error},
                             {"worst_param", r.worst_param},
                             {"pass", ok}});
      csv += to_string(kind) + "," + std::to_string(t) + "," + std::to_string(seed) + "," + std::to_string(r.nodes) +
             "," + std::to_string(r.hidden) + "," + std::to_string(r.checked) + "," + full(r.max_rel_error) + "," +
             (ok ? "1" : "0") + "\n";
    }
    log << (worst < o.tol ? "PASS " : "FAIL ") << to_string(kind) << " max relative error " << fmt(worst)
        << " over " << o.instances << " instances (tol " << fmt(o.tol) << ")\n";
  }
  if (!o.out.empty()) {
    const json report{{"seed", o.seed}, {"tol", o.tol}, {"instances", o.instances}, {"results", results}, {"pass", pass}};
    write_file(o.out, report.dump(2) + "\n");
    write_file(csv_sibling(o.out), csv);
  }
  return pass ? 0 : 1;
}

int cmd_verify_theory(const VerifyTheoryOptions& o, std::ostream& log) {
  const theory::SuiteOptions& s = o.suite;
  if (s.m < 0 || s.n < 1 || s.trials == 0) throw ConfigError("verify-theory: need m >= 0, n >= 1, trials >= 1");
  if (s.m > 12) throw ConfigError("verify-theory: m above 12 gives more than 8191 words");
  const theory::SuiteResult r = theory::run_theory_suite(s);
  for (const json& c : r.report.at("checks")) {
    log << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>();
    if (!c.at("applicable").get<bool>()) {
      log << " (not applicable)\n";
      continue;
    }
    log << " " << c.at("statistic").get<std::string>() << "=";
    log << (c.at("value").is_number() ? fmt(c.at("value").get<double>()) : std::string("inf"));
    log << " threshold " << fmt(c.at("threshold").get<double>()) << "\n";
  }
  if (!o.out.empty()) {
    write_file(o.out, r.report.dump(2) + "\n");
    write_file(csv_sibling(o.out), r.csv);
  }
  return r.pass ? 0 : 1;
}

}  // namespace mvgt

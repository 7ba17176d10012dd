#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mvgt/commands.hpp"
#include "mvgt/errors.hpp"
#include "mvgt/graph.hpp"
#include "mvgt/layer_checks.hpp"
#include "mvgt/synthetic.hpp"
#include "mvgt/theory.hpp"
#include "mvgt/theory_suite.hpp"
#include "mvgt/trainer.hpp"

namespace py = pybind11;
using namespace mvgt;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// JSON crosses the boundary as text; the Python package decodes it.

namespace {

Tensor to_tensor(const RowMatrix& m) {
  return Tensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                std::vector<double>(m.data(), m.data() + m.size()));
}

RowMatrix to_matrix(const Tensor& t) {
  RowMatrix m(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
  std::copy(t.data(), t.data() + t.size(), m.data());
  return m;
}

py::list edge_list(const Graph& g) {
  py::list out;
  for (const Edge& e : g.edges) out.append(py::make_tuple(e.i, e.j));
  return out;
}

theory::ShiftPair shift_pair(const theory::Matrix& s1, const theory::Matrix& s2) {
  if (s1.rows() != s1.cols() || s1.rows() != s2.rows() || s2.rows() != s2.cols()) {
    throw DimensionError("shift operators must be square and of equal size");
  }
  return theory::ShiftPair{s1, s2};
}

theory::FilterClass filter_class(const std::string& name) {
  if (name == "H1") return theory::FilterClass::H1;
  if (name == "H0") return theory::FilterClass::H0;
  if (name == "HGt") return theory::FilterClass::HGt;
  throw ConfigError("unknown filter class '" + name + "' (expected H1, H0 or HGt)");
}

std::string generate(const std::string& task, std::size_t count, std::uint64_t seed, std::size_t points,
                     std::size_t size) {
  Dataset d;
  if (task == "molecule") {
    d.samples = generate_synthetic_molecules(count, seed);
  } else if (task == "pointcloud") {
    CloudGenOptions o;
    o.points = points;
    d.samples = generate_point_clouds(count, seed, o);
  } else if (task == "planted-filter") {
    const PlantedProblem p = random_planted_problem(size, seed);
    d = generate_planted_filter_dataset(p.shifts, p.q, p.alpha, p.sigma, p.noise_var, count, seed, p.degree);
  } else {
    throw ConfigError("unknown task '" + task + "'");
  }
  return serialize_dataset(d);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph-tuple neural networks and filter-class theory checks";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<AssumptionViolation>(m, "AssumptionViolation", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  m.def("generate_dataset", &generate, py::arg("task"), py::arg("count"), py::arg("seed") = 0,
        py::arg("points") = 32, py::arg("size") = 6, "Synthetic dataset as line-delimited JSON text.");

  m.def(
      "train_json",
      [](const std::string& config, const std::string& data) {
        const ExperimentConfig c = ExperimentConfig::from_json(nlohmann::json::parse(config));
        const TrainOutcome t = train(c, parse_dataset(data));
        return py::make_tuple(t.model.dump(), t.report.dump(), t.csv);
      },
      py::arg("config"), py::arg("data"), "Returns (model JSON, report JSON, metrics CSV).");

  m.def(
      "evaluate_json",
      [](const std::string& model, const std::string& data) {
        return evaluate_model(nlohmann::json::parse(model), parse_dataset(data)).report.dump();
      },
      py::arg("model"), py::arg("data"));

  m.def(
      "gradcheck",
      [](const std::string& layer, std::uint64_t seed, double step) {
        const LayerCheckResult r = check_layer_gradients(layer_from_string(layer), seed, step);
        py::dict d;
        d["layer"] = to_string(r.layer);
        d["seed"] = r.seed;
        d["nodes"] = r.nodes;
        d["hidden"] = r.hidden;
        d["max_rel_error"] = r.max_rel_error;
        d["worst_param"] = r.worst_param;
        d["checked"] = r.checked;
        return d;
      },
      py::arg("layer"), py::arg("seed") = 0, py::arg("step") = 1e-6);

  m.def(
      "verify_theory_json",
      [](int m_, int n, std::size_t trials, std::uint64_t seed, std::size_t mc_samples) {
        theory::SuiteOptions o;
        o.m = m_;
        o.n = n;
        o.trials = trials;
        o.seed = seed;
        o.mc_samples = mc_samples;
        return theory::run_theory_suite(o).report.dump();
      },
      py::arg("m") = 2, py::arg("n") = 4, py::arg("trials") = 100, py::arg("seed") = 0,
      py::arg("mc_samples") = 100000);

  m.def(
      "coulomb_matrix",
      [](const std::vector<double>& charges, const RowMatrix& positions) {
        if (positions.cols() != 3 || static_cast<std::size_t>(positions.rows()) != charges.size()) {
          throw DimensionError("positions must be n x 3 with one charge per row");
        }
        return to_matrix(coulomb_matrix(PointCloud{to_tensor(positions), Tensor({charges.size()}, charges)}));
      },
      py::arg("charges"), py::arg("positions"));

  m.def(
      "threshold_views",
      [](const RowMatrix& interaction, double tau) {
        const GraphTuple t = partition_by_threshold(to_tensor(interaction), tau);
        return py::make_tuple(edge_list(t.views[0]), edge_list(t.views[1]));
      },
      py::arg("interaction"), py::arg("tau"), "(strong, weak) directed edge lists.");

  m.def(
      "radius_views",
      [](const RowMatrix& positions, double c1, double c2) {
        const GraphTuple t = partition_by_radii(to_tensor(positions), c1, c2);
        return py::make_tuple(edge_list(t.views[0]), edge_list(t.views[1]));
      },
      py::arg("positions"), py::arg("c1"), py::arg("c2"));

  m.def(
      "words",
      [](int m_) {
        std::vector<std::string> out;
        for (const theory::Word& w : theory::enumerate_words(m_)) out.push_back(theory::word_to_string(w));
        return out;
      },
      py::arg("m"), "Words of length <= m; the empty word is 'e'.");

  m.def(
      "nc_binomial_residual",
      [](const theory::Matrix& s1, const theory::Matrix& s2, int m_) {
        return theory::check_nc_binomial(m_, shift_pair(s1, s2));
      },
      py::arg("s1"), py::arg("s2"), py::arg("m"));

  m.def(
      "class_distance",
      [](const theory::Matrix& target, const theory::Matrix& s1, const theory::Matrix& s2, int m_,
         const std::string& cls, const theory::Matrix& sigma) {
        const theory::FilterBasis b = theory::build_basis(filter_class(cls), m_, shift_pair(s1, s2), sigma);
        return theory::sigma_project(target, b).residual_norm;
      },
      py::arg("target"), py::arg("s1"), py::arg("s2"), py::arg("m"), py::arg("cls"), py::arg("sigma"),
      "Sigma-weighted distance from `target` to the span of a filter class.");

  m.def(
      "oracle_risk_gap",
      [](const theory::Matrix& m_star, const theory::Matrix& s1, const theory::Matrix& s2, int m_,
         const theory::Matrix& sigma) {
        const theory::RiskGap g = theory::oracle_risk_gap(m_star, m_, shift_pair(s1, s2), sigma);
        py::dict d;
        d["dist_h1"] = g.dist_h1;
        d["dist_h0"] = g.dist_h0;
        d["dist_hgt"] = g.dist_hgt;
        d["gap"] = g.gap;
        d["orthogonal_sq"] = g.orthogonal_sq;
        return d;
      },
      py::arg("m_star"), py::arg("s1"), py::arg("s2"), py::arg("m"), py::arg("sigma"));
}

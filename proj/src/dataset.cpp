#include "mvgt/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mvgt/errors.hpp"

namespace mvgt {

using nlohmann::json;

theory::Matrix PlantedProblem::oracle() const {
  const theory::Matrix dense = shifts.s1 + shifts.s2;
  const auto n = shifts.size();
  theory::Matrix power = theory::Matrix::Identity(n, n);
  theory::Matrix m = theory::Matrix::Zero(n, n);
  for (double c : q) {
    m += c * power;
    power = (power * dense).eval();
  }
  return m + alpha * shifts.commutator();
}

namespace {

json matrix_json(const theory::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

json tensor_rows(const Tensor& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const auto r = t.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

const json& field(const json& j, const char* name, std::size_t line) {
  if (!j.contains(name)) throw SchemaError(at_line(line) + "missing field '" + name + "'");
  return j.at(name);
}

std::vector<double> number_list(const json& j, const char* name, std::size_t line) {
  if (!j.is_array()) throw SchemaError(at_line(line) + "field '" + name + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) throw SchemaError(at_line(line) + "field '" + name + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Tensor row_matrix(const json& j, const char* name, std::size_t width, std::size_t line) {
  if (!j.is_array()) throw SchemaError(at_line(line) + "field '" + name + "' must be an array of rows");
  std::vector<double> data;
  for (const json& r : j) {
    auto row = number_list(r, name, line);
    if (width != 0 && row.size() != width) {
      throw SchemaError(at_line(line) + "field '" + name + "' rows must have " + std::to_string(width) + " entries");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) throw SchemaError(at_line(line) + "field '" + name + "' is ragged");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({j.size(), width}, std::move(data));
}

theory::Matrix eigen_matrix(const json& j, const char* name, std::size_t line) {
  const Tensor t = row_matrix(j, name, 0, line);
  if (t.rows() != t.cols()) throw SchemaError(at_line(line) + "field '" + name + "' must be square");
  theory::Matrix m(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t k = 0; k < t.cols(); ++k) m(i, k) = t(i, k);
  return m;
}

Tensor vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

}  // namespace

json sample_to_json(const Sample& s) {
  json j;
  if (s.charges) j["charges"] = s.charges->storage();
  j["positions"] = tensor_rows(s.positions);
  j["targets"] = s.targets.storage();
  return j;
}

json planted_to_json(const PlantedProblem& p) {
  return json{{"planted",
               {{"degree", p.degree},
                {"s1", matrix_json(p.shifts.s1)},
                {"s2", matrix_json(p.shifts.s2)},
                {"sigma", matrix_json(p.sigma)},
                {"q", p.q},
                {"alpha", p.alpha},
                {"noise_var", p.noise_var},
                {"analytic_gap", p.analytic_gap}}}};
}

Dataset parse_dataset(const std::string& text) {
  Dataset data;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(at_line(line) + e.what());
    }
    if (!j.is_object()) throw ParseError(at_line(line) + "record must be a JSON object");

    if (j.contains("planted")) {
      const json& p = j.at("planted");
      PlantedProblem prob;
      prob.degree = field(p, "degree", line).get<int>();
      prob.shifts.s1 = eigen_matrix(field(p, "s1", line), "s1", line);
      prob.shifts.s2 = eigen_matrix(field(p, "s2", line), "s2", line);
      prob.sigma = eigen_matrix(field(p, "sigma", line), "sigma", line);
      prob.q = number_list(field(p, "q", line), "q", line);
      prob.alpha = field(p, "alpha", line).get<double>();
      prob.noise_var = field(p, "noise_var", line).get<double>();
      prob.analytic_gap = field(p, "analytic_gap", line).get<double>();
      data.planted = std::move(prob);
      continue;
    }
    if (j.contains("x") || j.contains("y")) {
      if (!data.planted) throw SchemaError(at_line(line) + "filter sample before the 'planted' header");
      const auto n = static_cast<std::size_t>(data.planted->shifts.size());
      FilterSample s{vec(number_list(field(j, "x", line), "x", line)), vec(number_list(field(j, "y", line), "y", line))};
      if (s.x.size() != n || s.y.size() != n) {
        throw SchemaError(at_line(line) + "x and y must have " + std::to_string(n) + " entries");
      }
      data.filter_samples.push_back(std::move(s));
      continue;
    }

    Sample s;
    s.positions = row_matrix(field(j, "positions", line), "positions", 3, line);
    s.targets = vec(number_list(field(j, "targets", line), "targets", line));
    if (j.contains("charges")) {
      s.charges = vec(number_list(j.at("charges"), "charges", line));
      if (s.charges->size() != s.positions.rows()) {
        throw SchemaError(at_line(line) + "'charges' and 'positions' lengths differ");
      }
    }
    if (s.positions.rows() == 0) throw SchemaError(at_line(line) + "'positions' is empty");
    if (!s.targets.all_finite()) throw SchemaError(at_line(line) + "'targets' must be finite");
    if (!data.samples.empty() && data.samples.front().targets.size() != s.targets.size()) {
      throw SchemaError(at_line(line) + "target count differs from earlier records");
    }
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty() && data.filter_samples.empty()) data.warnings.push_back("dataset is empty");
  return data;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::string serialize_dataset(const Dataset& data) {
  std::string out;
  if (data.planted) {
    out += planted_to_json(*data.planted).dump();
    out += '\n';
    for (const FilterSample& s : data.filter_samples) {
      out += json{{"x", s.x.storage()}, {"y", s.y.storage()}}.dump();
      out += '\n';
    }
  }
  for (const Sample& s : data.samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset '" + path + "'");
  out << serialize_dataset(data);
}

}  // namespace mvgt

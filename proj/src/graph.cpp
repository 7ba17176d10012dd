#include "mvgt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "mvgt/errors.hpp"

namespace mvgt {

std::vector<std::size_t> Graph::targets() const {
  std::vector<std::size_t> out(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) out[e] = edges[e].i;
  return out;
}

std::vector<std::size_t> Graph::sources() const {
  std::vector<std::size_t> out(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) out[e] = edges[e].j;
  return out;
}

std::vector<std::size_t> Graph::in_degree() const {
  std::vector<std::size_t> deg(num_nodes, 0);
  for (const Edge& e : edges) ++deg[e.i];
  return deg;
}

Tensor Graph::adjacency(bool weighted) const {
  Tensor a({num_nodes, num_nodes});
  for (std::size_t e = 0; e < edges.size(); ++e) a(edges[e].i, edges[e].j) = weighted ? edge_weight[e] : 1.0;
  return a;
}

namespace {

void require_square(const Tensor& x, const char* what) {
  if (x.rank() != 2 || x.rows() != x.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + shape_string(x.shape()));
  }
}

void require_positions(const Tensor& p, const char* what) {
  if (p.rank() != 2 || p.cols() != 3) {
    throw DimensionError(std::string(what) + ": positions must be n x 3, got " + shape_string(p.shape()));
  }
}

double distance(const Tensor& p, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double d = p(a, k) - p(b, k);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

Tensor coulomb_matrix(const PointCloud& cloud) {
  require_positions(cloud.positions, "coulomb_matrix");
  if (!cloud.charges) throw DomainError("coulomb_matrix: nuclear charges are required");
  const Tensor& z = *cloud.charges;
  const std::size_t n = cloud.size();
  if (z.size() != n) throw DimensionError("coulomb_matrix: charge count does not match atom count");
  Tensor x({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    x(i, i) = 0.5 * std::pow(z[i], 2.4);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(cloud.positions, i, j);
      if (d == 0.0) {
        throw SingularityError("coulomb_matrix: atoms " + std::to_string(i) + " and " + std::to_string(j) +
                               " coincide");
      }
      x(i, j) = x(j, i) = z[i] * z[j] / d;
    }
  }
  return x;
}

Graph threshold_graph(const Tensor& interaction, double c) {
  require_square(interaction, "threshold_graph");
  Graph g;
  g.num_nodes = interaction.rows();
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    for (std::size_t j = 0; j < g.num_nodes; ++j) {
      if (i != j && interaction(i, j) >= c) {
        g.edges.push_back({i, j});
        g.edge_weight.push_back(interaction(i, j));
      }
    }
  }
  return g;
}

GraphTuple partition_by_threshold(const Tensor& interaction, double tau) {
  require_square(interaction, "partition_by_threshold");
  const std::size_t n = interaction.rows();
  GraphTuple t;
  t.views.resize(2);
  t.boundaries = {tau};
  for (Graph& g : t.views) g.num_nodes = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = interaction(i, j);
      Graph& g = w >= tau ? t.views[0] : t.views[1];
      g.edges.push_back({i, j});
      g.edge_weight.push_back(w);
    }
  }
  return t;
}

Graph radius_graph(const Tensor& positions, double r) {
  require_positions(positions, "radius_graph");
  Graph g;
  g.num_nodes = positions.rows();
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    for (std::size_t j = 0; j < g.num_nodes; ++j) {
      if (i == j) continue;
      const double d = distance(positions, i, j);
      if (d > 0.0 && d <= r) {
        g.edges.push_back({i, j});
        g.edge_weight.push_back(d);
      }
    }
  }
  return g;
}

GraphTuple partition_by_radii(const Tensor& positions, double c1, double c2) {
  require_positions(positions, "partition_by_radii");
  if (!(c1 > 0.0) || !(c2 > c1)) {
    throw ConfigError("partition_by_radii: need 0 < c1 < c2, got c1=" + std::to_string(c1) +
                      " c2=" + std::to_string(c2));
  }
  const std::size_t n = positions.rows();
  GraphTuple t;
  t.views.resize(2);
  t.boundaries = {c1, c2};
  for (Graph& g : t.views) g.num_nodes = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = distance(positions, i, j);
      if (!(d > 0.0) || d > c2) continue;
      Graph& g = d <= c1 ? t.views[0] : t.views[1];
      g.edges.push_back({i, j});
      g.edge_weight.push_back(d);
    }
  }
  return t;
}

GraphTuple single_view(Graph g, double boundary) {
  GraphTuple t;
  t.views.push_back(std::move(g));
  t.boundaries = {boundary};
  return t;
}

std::string validate_tuple(const GraphTuple& tuple) {
  const std::size_t n = tuple.num_nodes();
  std::set<Edge> seen;
  for (std::size_t v = 0; v < tuple.views.size(); ++v) {
    const Graph& g = tuple.views[v];
    const std::string tag = "view " + std::to_string(v) + ": ";
    if (g.num_nodes != n) return tag + "node count differs from view 0";
    if (g.edge_weight.size() != g.edges.size()) return tag + "edge weight count mismatch";
    if (!g.edge_feat.empty() && g.edge_feat.rows() != g.edges.size()) return tag + "edge feature row mismatch";
    std::map<Edge, double> weights;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const Edge& ed = g.edges[e];
      if (ed.i >= n || ed.j >= n) return tag + "edge index out of range";
      if (ed.i == ed.j) return tag + "self-loop at node " + std::to_string(ed.i);
      if (!weights.emplace(ed, g.edge_weight[e]).second) return tag + "duplicate edge";
      if (!seen.insert(ed).second) return tag + "edge shared with another view";
    }
    for (const auto& [ed, w] : weights) {
      auto it = weights.find(Edge{ed.j, ed.i});
      if (it == weights.end()) return tag + "missing reverse edge";
      if (it->second != w) return tag + "asymmetric edge weight";
    }
  }
  return {};
}

Graph permute_graph(const Graph& g, const std::vector<std::size_t>& perm) {
  if (perm.size() != g.num_nodes) throw DimensionError("permute_graph: permutation size mismatch");
  std::vector<std::size_t> order(g.edges.size());
  std::vector<Edge> renamed(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    renamed[e] = Edge{perm[g.edges[e].i], perm[g.edges[e].j]};
    order[e] = e;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return renamed[a] < renamed[b]; });
  Graph out;
  out.num_nodes = g.num_nodes;
  if (!g.edge_feat.empty()) out.edge_feat = gather_rows(g.edge_feat, order);
  for (std::size_t e : order) {
    out.edges.push_back(renamed[e]);
    out.edge_weight.push_back(g.edge_weight[e]);
  }
  return out;
}

}  // namespace mvgt

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mvgt/tensor.hpp"

namespace mvgt {

/// Atoms or halos in 3D. `charges` holds nuclear charges for molecules.
struct PointCloud {
  Tensor positions;  // n x 3
  std::optional<Tensor> charges;

  std::size_t size() const { return positions.rows(); }
};

/// Directed edge: node `i` aggregates a message from neighbor `j`.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// Symmetric, self-loop-free graph with a scalar weight and a feature row per edge.
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  std::vector<double> edge_weight;
  Tensor edge_feat;  // |E| x d_e, may be empty until features are attached

  std::size_t num_edges() const { return edges.size(); }
  /// Target nodes (`i`) of every edge.
  std::vector<std::size_t> targets() const;
  /// Source nodes (`j`) of every edge.
  std::vector<std::size_t> sources() const;
  std::vector<std::size_t> in_degree() const;
  /// Dense adjacency with the edge weights (or ones) as entries.
  Tensor adjacency(bool weighted = false) const;
};

/// k edge-disjoint views over one node set.
struct GraphTuple {
  std::vector<Graph> views;
  std::vector<double> boundaries;  // thresholds or radii that produced the views

  std::size_t num_views() const { return views.size(); }
  std::size_t num_nodes() const { return views.empty() ? 0 : views.front().num_nodes; }
};

/// X_ii = 0.5 Z_i^2.4, X_ij = Z_i Z_j / |R_i - R_j|.
/// Throws DomainError without charges and SingularityError for coincident atoms.
Tensor coulomb_matrix(const PointCloud& cloud);

/// Off-diagonal pairs with X_ij >= c; edge weight X_ij.
Graph threshold_graph(const Tensor& interaction, double c);

/// View 1: X_ij >= tau. View 2: every other off-diagonal pair.
GraphTuple partition_by_threshold(const Tensor& interaction, double tau);

/// Pairs with 0 < d_ij <= r; edge weight d_ij.
Graph radius_graph(const Tensor& positions, double r);

/// View 1: d <= c1. View 2: c1 < d <= c2. Farther pairs are dropped.
/// Throws ConfigError unless 0 < c1 < c2.
GraphTuple partition_by_radii(const Tensor& positions, double c1, double c2);

/// Single-view tuple wrapping `g`, used by the single-graph baselines.
GraphTuple single_view(Graph g, double boundary);

/// Checks symmetry, self-loops, index range and pairwise disjointness.
/// Returns an empty string when valid, otherwise a description of the first violation.
std::string validate_tuple(const GraphTuple& tuple);

/// Renumbers nodes: node v becomes perm[v]. Edge order follows the renumbered pairs.
Graph permute_graph(const Graph& g, const std::vector<std::size_t>& perm);

}  // namespace mvgt

#pragma once

#include <cstdint>
#include <string>

#include "mvgt/gt_layers.hpp"

namespace mvgt {

enum class LayerKind { GineConv, Egcl, GineGt, EgnnGt };

std::string to_string(LayerKind k);
/// "gine", "egcl", "gine-gt" or "egnn-gt".
LayerKind layer_from_string(const std::string& name);

/// Small random input for layer-level checks: n in [3, 8] nodes, hidden
/// width in [4, 16], random features and coordinates, and two views cut
/// from a random symmetric matrix at 0.5, each with 3-dim edge features.
struct LayerInstance {
  std::size_t nodes = 0;
  std::size_t hidden = 0;
  Tensor h;  // nodes x hidden
  Tensor x;  // nodes x 3
  GraphTuple tuple;
};

inline constexpr std::size_t kInstanceEdgeDim = 3;

LayerInstance random_layer_instance(std::uint64_t seed, std::size_t max_nodes = 8, std::size_t max_hidden = 16);

struct LayerCheckResult {
  LayerKind layer = LayerKind::GineConv;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t hidden = 0;
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t checked = 0;
};

/// Compares analytic gradients of sum(R * H') (+ sum(Q * X') for the
/// equivariant layers) with central differences, over every parameter and
/// the input features and coordinates.
LayerCheckResult check_layer_gradients(LayerKind kind, std::uint64_t seed, double step = 1e-6);

}  // namespace mvgt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvgt/gt_layers.hpp"

namespace mvgt {

enum class Backbone { Gine, Egnn };

std::string to_string(Backbone b);
Backbone backbone_from_string(const std::string& name);

/// Architecture of a graph-level regressor: node encoder, a stack of
/// graph-tuple layers, global mean pooling and an MLP head. A single-graph
/// baseline is the same network with one view.
struct NetworkSpec {
  Backbone backbone = Backbone::Gine;
  std::size_t node_in = 100;
  std::size_t edge_in = 100;
  std::size_t hidden = 100;
  std::size_t layers = 2;
  std::size_t views = 2;
  std::size_t targets = 1;
  /// Affine layers in the head (3 for the molecular model, 2 for point clouds).
  std::size_t head_layers = 3;
  CoordNorm coord_norm = CoordNorm::MeanDegree;
  double coord_scale = 1.0;

  nlohmann::json to_json() const;
  static NetworkSpec from_json(const nlohmann::json& j);
};

/// One graph: raw node features, positions (EGNN only) and the tuple whose
/// views carry raw edge features.
struct GraphInput {
  Tensor node_feat;
  Tensor positions;
  GraphTuple tuple;
};

struct NetworkCache {
  MlpCache encoder;
  std::vector<GineGtCache> gine;
  std::vector<EgnnGtCache> egnn;
  std::size_t nodes = 0;
  MlpCache head;
};

class Network {
 public:
  Network() = default;
  Network(const NetworkSpec& spec, std::uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }

  /// Model-space prediction (rank-1, one entry per target).
  Tensor forward(const GraphInput& input, NetworkCache* cache = nullptr) const;
  /// Accumulates gradients of a loss whose gradient w.r.t. the prediction is `d_pred`.
  void backward(const GraphInput& input, const NetworkCache& cache, const Tensor& d_pred);

  ParamList parameters();
  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

  std::vector<GineGtParams>& gine_layers() { return gine_; }
  std::vector<EgnnGtParams>& egnn_layers() { return egnn_; }

  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);

 private:
  ParamList collect() const;

  NetworkSpec spec_;
  Mlp encoder_;
  std::vector<GineGtParams> gine_;
  std::vector<EgnnGtParams> egnn_;
  Mlp head_;
};

}  // namespace mvgt

#pragma once

#include <optional>
#include <random>

#include "mvgt/graph.hpp"
#include "mvgt/mlp.hpp"

namespace mvgt {

/// One GINE convolution: a two-layer ReLU MLP, a learnable epsilon, and
/// optionally the single linear layer that encodes raw edge features.
struct GineParams {
  Mlp mlp;
  Param epsilon = Param::scalar(0.0);
  std::optional<Mlp> edge_encoder;

  /// hidden -> hidden -> hidden MLP; with `raw_edge_dim` > 0 also an
  /// edge encoder raw_edge_dim -> hidden.
  static GineParams make(std::size_t hidden, std::size_t raw_edge_dim, std::mt19937_64& rng);

  std::size_t width() const { return mlp.in_dim(); }
  void collect(ParamList& out);
};

struct GineCache {
  Tensor h;          // input node features
  Tensor messages;   // pre-ReLU h_j + e_ij per edge
  MlpCache mlp;
};

/// Linear edge encoding; caches the raw input for the backward pass.
Tensor encode_edges(const Mlp& encoder, const Tensor& raw, MlpCache* cache = nullptr);

/// h_i' = MLP((1 + eps) h_i + sum_{j in N(i)} ReLU(h_j + e_ij)).
/// `edge_enc` holds the already-encoded edge features, |E| x d.
Tensor gine_conv(const Tensor& h, const Graph& g, const Tensor& edge_enc, const GineParams& params,
                 GineCache* cache = nullptr);

struct GineGrads {
  Tensor h;         // d loss / d h
  Tensor edge_enc;  // d loss / d edge_enc
};

/// Accumulates parameter gradients into `params`.
GineGrads gine_conv_backward(GineParams& params, const Graph& g, const GineCache& cache, const Tensor& upstream);

}  // namespace mvgt

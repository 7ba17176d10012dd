#pragma once

#include <random>
#include <vector>

#include "mvgt/egcl.hpp"
#include "mvgt/gine.hpp"
#include "mvgt/graph.hpp"

namespace mvgt {

/// Learnable mixing scalars of a graph-tuple layer: one per view (intra)
/// and one per ordered pair of distinct views (inter).
struct GtCombiner {
  std::size_t k = 0;
  std::vector<Param> intra;
  std::vector<Param> inter;

  /// c_i = 1/k, c_ij = 0.
  static GtCombiner make(std::size_t k);

  /// Slot of the ordered pair (i, j), i != j, in `inter`.
  std::size_t pair_index(std::size_t i, std::size_t j) const { return i * (k - 1) + (j < i ? j : j - 1); }
  void set_all(double v);
  void collect(ParamList& out);
};

/// k intra-view and k(k-1) inter-view GINE convolutions, all with their own
/// weights. Only intra-view bundles carry edge encoders: view j's encoded
/// edges are shared by GINEConv_j and every GINEConv_{i->j}.
struct GineGtParams {
  std::vector<GineParams> intra;
  std::vector<GineParams> inter;
  GtCombiner combiner;

  static GineGtParams make(std::size_t k, std::size_t hidden, std::size_t raw_edge_dim, std::mt19937_64& rng);
  std::size_t num_views() const { return intra.size(); }
  void collect(ParamList& out);
};

struct GineGtCache {
  std::vector<Tensor> edge_enc;
  std::vector<MlpCache> encoder;
  std::vector<GineCache> intra;
  std::vector<Tensor> intra_out;
  std::vector<GineCache> inter;
  std::vector<Tensor> inter_out;
};

/// H' = H + sum_i c_i H_i + sum_{i != j} c_ij H_{i->j} with
/// H_i = GINEConv_i(H, E_i) and H_{i->j} = GINEConv_ij(H_i, E_j).
Tensor gine_gt_layer(const Tensor& h, const GraphTuple& tuple, const GineGtParams& params,
                     GineGtCache* cache = nullptr);

/// Returns d loss / d H and accumulates every parameter gradient.
Tensor gine_gt_backward(GineGtParams& params, const GraphTuple& tuple, const GineGtCache& cache,
                        const Tensor& upstream);

/// All intermediate representations of a graph-tuple layer share one EGCL.
struct EgnnGtParams {
  EgclParams egcl;
  GtCombiner combiner;

  static EgnnGtParams make(std::size_t k, std::size_t hidden, std::size_t edge_dim, std::mt19937_64& rng);
  std::size_t num_views() const { return combiner.k; }
  void collect(ParamList& out);
};

struct EgnnGtCache {
  std::vector<EgclCache> intra;
  std::vector<EgclOutput> intra_out;
  std::vector<EgclCache> inter;
  std::vector<EgclOutput> inter_out;
};

struct EgnnGtResult {
  Tensor h;
  Tensor x;
};

/// Intra: (H_i, dX_i) = EGCL(H, X, E_i). Inter: (H_{i->j}, dX_{i->j}) =
/// EGCL(H_i, X + dX_i, E_j). Features combine as in the GINE variant and
/// X' = X + sum_i c_i dX_i + sum_{i != j} c_ij dX_{i->j}.
EgnnGtResult egnn_gt_layer(const Tensor& h, const Tensor& x, const GraphTuple& tuple, const EgnnGtParams& params,
                           EgnnGtCache* cache = nullptr);

struct EgnnGtGrads {
  Tensor h;
  Tensor x;
};

EgnnGtGrads egnn_gt_backward(EgnnGtParams& params, const GraphTuple& tuple, const EgnnGtCache& cache,
                             const Tensor& d_h, const Tensor& d_x);

/// Column means of n x d features. Throws DomainError for n = 0.
Tensor global_mean_pool(const Tensor& h);
/// Spreads the pooled gradient back over n rows.
Tensor global_mean_pool_backward(const Tensor& upstream, std::size_t n);

/// Applies a plain MLP head to a pooled graph vector; returns a rank-1 tensor.
Tensor predict_head(const Tensor& pooled, const Mlp& head, MlpCache* cache = nullptr);

}  // namespace mvgt

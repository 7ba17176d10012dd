#pragma once

#include <random>

#include "mvgt/graph.hpp"
#include "mvgt/mlp.hpp"

namespace mvgt {

/// How the coordinate update is scaled: coord_scale / max(1, |N(i)|) per
/// node, or coord_scale for every node.
enum class CoordNorm { MeanDegree, Constant };

/// E(n)-equivariant convolution. phi_e maps (h_i, h_j, |x_i - x_j|^2, a_ij)
/// to a message, phi_x maps a message to a scalar coordinate weight and
/// phi_h maps (h_i, sum_j m_ij) to the new features.
struct EgclParams {
  Mlp phi_e;
  Mlp phi_x;
  Mlp phi_h;
  CoordNorm norm = CoordNorm::MeanDegree;
  double coord_scale = 1.0;

  static EgclParams make(std::size_t hidden, std::size_t edge_dim, std::mt19937_64& rng);

  std::size_t width() const { return phi_h.out_dim(); }
  std::size_t edge_dim() const { return phi_e.in_dim() - 2 * phi_h.out_dim() - 1; }
  void collect(ParamList& out);
};

struct EgclCache {
  Tensor diff;                 // x_i - x_j per edge, |E| x 3
  Tensor weights;              // phi_x output per edge, |E| x 1
  std::vector<double> coef;    // C_i per node
  std::size_t width = 0;
  MlpCache phi_e;
  MlpCache phi_x;
  MlpCache phi_h;
};

/// Feature update and coordinate displacement of one EGCL application.
struct EgclOutput {
  Tensor h;         // n x hidden
  Tensor delta_x;   // n x 3, so that x' = x + delta_x
};

EgclOutput egcl_step(const Tensor& h, const Tensor& x, const Graph& g, const EgclParams& params,
                     EgclCache* cache = nullptr);

struct EgclGrads {
  Tensor h;
  Tensor x;
};

/// Backward of `egcl_step`: upstream gradients with respect to the new
/// features and the displacement. Accumulates into `params`.
EgclGrads egcl_step_backward(EgclParams& params, const Graph& g, const EgclCache& cache, const Tensor& d_h,
                             const Tensor& d_delta_x);

struct EgclResult {
  Tensor h;
  Tensor x;
};

/// (H', X') = EGCL(H, X, E, A) with X' = X + delta_x.
EgclResult egcl(const Tensor& h, const Tensor& x, const Graph& g, const EgclParams& params);

}  // namespace mvgt

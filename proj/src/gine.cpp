#include "mvgt/gine.hpp"

#include <string>

#include "mvgt/errors.hpp"

namespace mvgt {

GineParams GineParams::make(std::size_t hidden, std::size_t raw_edge_dim, std::mt19937_64& rng) {
  GineParams p;
  p.mlp = Mlp({hidden, hidden, hidden}, Activation::ReLU, false, rng);
  if (raw_edge_dim > 0) p.edge_encoder = Mlp({raw_edge_dim, hidden}, Activation::ReLU, false, rng);
  return p;
}

void GineParams::collect(ParamList& out) {
  mlp.collect(out);
  out.push_back(&epsilon);
  if (edge_encoder) edge_encoder->collect(out);
}

Tensor encode_edges(const Mlp& encoder, const Tensor& raw, MlpCache* cache) {
  if (raw.rows() == 0) {
    if (cache) {
      cache->inputs.assign(1, Tensor({0, encoder.in_dim()}));
      cache->preactivations.assign(1, Tensor({0, encoder.out_dim()}));
    }
    return Tensor({0, encoder.out_dim()});
  }
  return mlp_forward(encoder, raw, cache);
}

Tensor gine_conv(const Tensor& h, const Graph& g, const Tensor& edge_enc, const GineParams& params,
                 GineCache* cache) {
  const std::size_t n = h.rows();
  const std::size_t d = h.cols();
  if (h.rank() != 2 || n != g.num_nodes) {
    throw DimensionError("gine_conv: node features " + shape_string(h.shape()) + " for a graph with " +
                         std::to_string(g.num_nodes) + " nodes");
  }
  if (d != params.width()) {
    throw DimensionError("gine_conv: feature width " + std::to_string(d) + " but MLP expects " +
                         std::to_string(params.width()));
  }
  if (g.num_edges() > 0 && (edge_enc.rows() != g.num_edges() || edge_enc.cols() != d)) {
    throw DimensionError("gine_conv: encoded edge features " + shape_string(edge_enc.shape()) + " must be " +
                         std::to_string(g.num_edges()) + " x " + std::to_string(d));
  }
  const double scale = 1.0 + params.epsilon.value[0];
  Tensor agg = h * scale;
  Tensor msg({g.num_edges(), d});
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto hj = h.row(g.edges[e].j);
    const auto ee = edge_enc.row(e);
    auto m = msg.row(e);
    auto out = agg.row(g.edges[e].i);
    for (std::size_t c = 0; c < d; ++c) {
      m[c] = hj[c] + ee[c];
      if (m[c] > 0.0) out[c] += m[c];
    }
  }
  if (cache) {
    cache->h = h;
    cache->messages = std::move(msg);
    return mlp_forward(params.mlp, agg, &cache->mlp);
  }
  return mlp_forward(params.mlp, agg);
}

GineGrads gine_conv_backward(GineParams& params, const Graph& g, const GineCache& cache, const Tensor& upstream) {
  const Tensor dagg = mlp_backward(params.mlp, cache.mlp, upstream);
  const std::size_t d = dagg.cols();
  const double scale = 1.0 + params.epsilon.value[0];
  params.epsilon.grad[0] += dot(dagg, cache.h);
  GineGrads out{dagg * scale, Tensor({g.num_edges(), d})};
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto m = cache.messages.row(e);
    const auto up = dagg.row(g.edges[e].i);
    auto dh = out.h.row(g.edges[e].j);
    auto de = out.edge_enc.row(e);
    for (std::size_t c = 0; c < d; ++c) {
      if (m[c] > 0.0) {
        dh[c] += up[c];
        de[c] = up[c];
      }
    }
  }
  return out;
}

}  // namespace mvgt

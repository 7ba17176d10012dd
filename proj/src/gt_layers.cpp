#include "mvgt/gt_layers.hpp"

#include <string>

#include "mvgt/errors.hpp"

namespace mvgt {

GtCombiner GtCombiner::make(std::size_t k) {
  if (k == 0) throw ConfigError("a graph tuple needs at least one view");
  GtCombiner c;
  c.k = k;
  for (std::size_t i = 0; i < k; ++i) c.intra.push_back(Param::scalar(1.0 / static_cast<double>(k)));
  for (std::size_t i = 0; i < k * (k - 1); ++i) c.inter.push_back(Param::scalar(0.0));
  return c;
}

void GtCombiner::set_all(double v) {
  for (Param& p : intra) p.value[0] = v;
  for (Param& p : inter) p.value[0] = v;
}

void GtCombiner::collect(ParamList& out) {
  for (Param& p : intra) out.push_back(&p);
  for (Param& p : inter) out.push_back(&p);
}

namespace {

void require_views(const GraphTuple& tuple, std::size_t k, const Tensor& h, const char* what) {
  if (tuple.num_views() != k) {
    throw ConfigError(std::string(what) + ": tuple has " + std::to_string(tuple.num_views()) +
                      " views but the layer was built for " + std::to_string(k));
  }
  if (h.rows() != tuple.num_nodes()) {
    throw DimensionError(std::string(what) + ": " + std::to_string(h.rows()) + " feature rows for " +
                         std::to_string(tuple.num_nodes()) + " nodes");
  }
}

}  // namespace

GineGtParams GineGtParams::make(std::size_t k, std::size_t hidden, std::size_t raw_edge_dim, std::mt19937_64& rng) {
  GineGtParams p;
  for (std::size_t i = 0; i < k; ++i) p.intra.push_back(GineParams::make(hidden, raw_edge_dim, rng));
  for (std::size_t i = 0; i < k * (k - 1); ++i) p.inter.push_back(GineParams::make(hidden, 0, rng));
  p.combiner = GtCombiner::make(k);
  return p;
}

void GineGtParams::collect(ParamList& out) {
  for (GineParams& g : intra) g.collect(out);
  for (GineParams& g : inter) g.collect(out);
  combiner.collect(out);
}

Tensor gine_gt_layer(const Tensor& h, const GraphTuple& tuple, const GineGtParams& params, GineGtCache* cache) {
  const std::size_t k = params.num_views();
  require_views(tuple, k, h, "gine_gt_layer");
  if (params.inter.size() != k * (k - 1) || params.combiner.k != k) {
    throw ConfigError("gine_gt_layer: expected " + std::to_string(k * k) + " GINE bundles");
  }
  GineGtCache local;
  GineGtCache& c = cache ? *cache : local;
  c.edge_enc.assign(k, Tensor());
  c.encoder.assign(k, MlpCache());
  c.intra.assign(k, GineCache());
  c.intra_out.assign(k, Tensor());
  c.inter.assign(k * (k - 1), GineCache());
  c.inter_out.assign(k * (k - 1), Tensor());

  for (std::size_t i = 0; i < k; ++i) {
    const GineParams& bundle = params.intra[i];
    if (!bundle.edge_encoder) throw ConfigError("gine_gt_layer: intra-view bundle without an edge encoder");
    c.edge_enc[i] = encode_edges(*bundle.edge_encoder, tuple.views[i].edge_feat, &c.encoder[i]);
    c.intra_out[i] = gine_conv(h, tuple.views[i], c.edge_enc[i], bundle, &c.intra[i]);
  }
  Tensor out = h;
  for (std::size_t i = 0; i < k; ++i) out.axpy(params.combiner.intra[i].value[0], c.intra_out[i]);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::size_t p = params.combiner.pair_index(i, j);
      c.inter_out[p] = gine_conv(c.intra_out[i], tuple.views[j], c.edge_enc[j], params.inter[p], &c.inter[p]);
      out.axpy(params.combiner.inter[p].value[0], c.inter_out[p]);
    }
  }
  return out;
}

Tensor gine_gt_backward(GineGtParams& params, const GraphTuple& tuple, const GineGtCache& cache,
                        const Tensor& upstream) {
  const std::size_t k = params.num_views();
  Tensor dh = upstream;
  std::vector<Tensor> d_intra(k);
  std::vector<Tensor> d_enc(k);
  for (std::size_t i = 0; i < k; ++i) {
    params.combiner.intra[i].grad[0] += dot(upstream, cache.intra_out[i]);
    d_intra[i] = upstream * params.combiner.intra[i].value[0];
    d_enc[i] = Tensor(cache.edge_enc[i].shape());
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::size_t p = params.combiner.pair_index(i, j);
      params.combiner.inter[p].grad[0] += dot(upstream, cache.inter_out[p]);
      const Tensor d_out = upstream * params.combiner.inter[p].value[0];
      GineGrads g = gine_conv_backward(params.inter[p], tuple.views[j], cache.inter[p], d_out);
      d_intra[i] += g.h;
      if (tuple.views[j].num_edges() > 0) d_enc[j] += g.edge_enc;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    GineGrads g = gine_conv_backward(params.intra[i], tuple.views[i], cache.intra[i], d_intra[i]);
    dh += g.h;
    if (tuple.views[i].num_edges() > 0) {
      d_enc[i] += g.edge_enc;
      mlp_backward(*params.intra[i].edge_encoder, cache.encoder[i], d_enc[i]);
    }
  }
  return dh;
}

EgnnGtParams EgnnGtParams::make(std::size_t k, std::size_t hidden, std::size_t edge_dim, std::mt19937_64& rng) {
  EgnnGtParams p;
  p.egcl = EgclParams::make(hidden, edge_dim, rng);
  p.combiner = GtCombiner::make(k);
  return p;
}

void EgnnGtParams::collect(ParamList& out) {
  egcl.collect(out);
  combiner.collect(out);
}

EgnnGtResult egnn_gt_layer(const Tensor& h, const Tensor& x, const GraphTuple& tuple, const EgnnGtParams& params,
                           EgnnGtCache* cache) {
  const std::size_t k = params.num_views();
  require_views(tuple, k, h, "egnn_gt_layer");
  EgnnGtCache local;
  EgnnGtCache& c = cache ? *cache : local;
  c.intra.assign(k, EgclCache());
  c.intra_out.assign(k, EgclOutput());
  c.inter.assign(k * (k - 1), EgclCache());
  c.inter_out.assign(k * (k - 1), EgclOutput());

  EgnnGtResult out{h, x};
  for (std::size_t i = 0; i < k; ++i) {
    c.intra_out[i] = egcl_step(h, x, tuple.views[i], params.egcl, &c.intra[i]);
    const double ci = params.combiner.intra[i].value[0];
    out.h.axpy(ci, c.intra_out[i].h);
    out.x.axpy(ci, c.intra_out[i].delta_x);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Tensor moved = x + c.intra_out[i].delta_x;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::size_t p = params.combiner.pair_index(i, j);
      c.inter_out[p] = egcl_step(c.intra_out[i].h, moved, tuple.views[j], params.egcl, &c.inter[p]);
      const double cij = params.combiner.inter[p].value[0];
      out.h.axpy(cij, c.inter_out[p].h);
      out.x.axpy(cij, c.inter_out[p].delta_x);
    }
  }
  return out;
}

EgnnGtGrads egnn_gt_backward(EgnnGtParams& params, const GraphTuple& tuple, const EgnnGtCache& cache,
                             const Tensor& d_h, const Tensor& d_x) {
  const std::size_t k = params.num_views();
  EgnnGtGrads out{d_h, d_x};
  std::vector<Tensor> dh_intra(k);
  std::vector<Tensor> ddx_intra(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double ci = params.combiner.intra[i].value[0];
    params.combiner.intra[i].grad[0] += dot(d_h, cache.intra_out[i].h) + dot(d_x, cache.intra_out[i].delta_x);
    dh_intra[i] = d_h * ci;
    ddx_intra[i] = d_x * ci;
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::size_t p = params.combiner.pair_index(i, j);
      const double cij = params.combiner.inter[p].value[0];
      params.combiner.inter[p].grad[0] += dot(d_h, cache.inter_out[p].h) + dot(d_x, cache.inter_out[p].delta_x);
      EgclGrads g = egcl_step_backward(params.egcl, tuple.views[j], cache.inter[p], d_h * cij, d_x * cij);
      dh_intra[i] += g.h;
      // The inter call ran at X + dX_i.
      out.x += g.x;
      ddx_intra[i] += g.x;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    EgclGrads g = egcl_step_backward(params.egcl, tuple.views[i], cache.intra[i], dh_intra[i], ddx_intra[i]);
    out.h += g.h;
    out.x += g.x;
  }
  return out;
}

Tensor global_mean_pool(const Tensor& h) {
  if (h.rank() != 2 || h.rows() == 0) throw DomainError("global_mean_pool: need at least one node");
  Tensor out = column_sum(h);
  out *= 1.0 / static_cast<double>(h.rows());
  return out;
}

Tensor global_mean_pool_backward(const Tensor& upstream, std::size_t n) {
  Tensor out({n, upstream.size()});
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < upstream.size(); ++c) out(i, c) = upstream[c] * w;
  return out;
}

Tensor predict_head(const Tensor& pooled, const Mlp& head, MlpCache* cache) {
  const Tensor row = pooled.reshaped({1, pooled.size()});
  const Tensor out = mlp_forward(head, row, cache);
  return out.reshaped({out.size()});
}

}  // namespace mvgt

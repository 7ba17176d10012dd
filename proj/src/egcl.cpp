#include "mvgt/egcl.hpp"

#include <algorithm>
#include <string>

#include "mvgt/errors.hpp"

namespace mvgt {

EgclParams EgclParams::make(std::size_t hidden, std::size_t edge_dim, std::mt19937_64& rng) {
  EgclParams p;
  p.phi_e = Mlp({2 * hidden + 1 + edge_dim, hidden, hidden}, Activation::SiLU, true, rng);
  p.phi_x = Mlp({hidden, hidden, 1}, Activation::SiLU, false, rng);
  p.phi_h = Mlp({2 * hidden, hidden, hidden}, Activation::SiLU, false, rng);
  return p;
}

void EgclParams::collect(ParamList& out) {
  phi_e.collect(out);
  phi_x.collect(out);
  phi_h.collect(out);
}

EgclOutput egcl_step(const Tensor& h, const Tensor& x, const Graph& g, const EgclParams& params,
                     EgclCache* cache) {
  const std::size_t n = g.num_nodes;
  const std::size_t d = params.width();
  const std::size_t de = params.edge_dim();
  const std::size_t ne = g.num_edges();
  if (h.rank() != 2 || h.rows() != n || h.cols() != d) {
    throw DimensionError("egcl: node features " + shape_string(h.shape()) + " but expected " + std::to_string(n) +
                         " x " + std::to_string(d));
  }
  if (x.rank() != 2 || x.rows() != n || x.cols() != 3) {
    throw DimensionError("egcl: coordinates must be n x 3, got " + shape_string(x.shape()));
  }
  if (ne > 0 && (g.edge_feat.rows() != ne || g.edge_feat.cols() != de)) {
    throw DimensionError("egcl: edge features " + shape_string(g.edge_feat.shape()) + " but expected width " +
                         std::to_string(de));
  }

  Tensor z({ne, 2 * d + 1 + de});
  Tensor diff({ne, 3});
  for (std::size_t e = 0; e < ne; ++e) {
    const Edge& ed = g.edges[e];
    double* row = z.data() + e * z.cols();
    std::copy_n(h.data() + ed.i * d, d, row);
    std::copy_n(h.data() + ed.j * d, d, row + d);
    double d2 = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      diff(e, k) = x(ed.i, k) - x(ed.j, k);
      d2 += diff(e, k) * diff(e, k);
    }
    row[2 * d] = d2;
    if (de > 0) std::copy_n(g.edge_feat.data() + e * de, de, row + 2 * d + 1);
  }

  MlpCache local_e;
  MlpCache local_x;
  MlpCache local_h;
  MlpCache* ce = cache ? &cache->phi_e : &local_e;
  MlpCache* cx = cache ? &cache->phi_x : &local_x;
  MlpCache* ch = cache ? &cache->phi_h : &local_h;

  const Tensor m = mlp_forward(params.phi_e, z, ce);
  Tensor s = mlp_forward(params.phi_x, m, cx);

  std::vector<double> coef(n, params.coord_scale);
  if (params.norm == CoordNorm::MeanDegree) {
    const auto deg = g.in_degree();
    for (std::size_t i = 0; i < n; ++i) coef[i] = params.coord_scale / static_cast<double>(std::max<std::size_t>(1, deg[i]));
  }

  EgclOutput out{Tensor(), Tensor({n, 3})};
  Tensor agg({n, d});
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t i = g.edges[e].i;
    for (std::size_t k = 0; k < 3; ++k) out.delta_x(i, k) += coef[i] * diff(e, k) * s[e];
    const double* mr = m.data() + e * d;
    double* ar = agg.data() + i * d;
    for (std::size_t c = 0; c < d; ++c) ar[c] += mr[c];
  }
  out.h = mlp_forward(params.phi_h, concat_cols({&h, &agg}), ch);

  if (cache) {
    cache->diff = std::move(diff);
    cache->weights = std::move(s);
    cache->coef = std::move(coef);
    cache->width = d;
  }
  return out;
}

EgclGrads egcl_step_backward(EgclParams& params, const Graph& g, const EgclCache& cache, const Tensor& d_h,
                             const Tensor& d_delta_x) {
  const std::size_t n = g.num_nodes;
  const std::size_t d = cache.width;
  const std::size_t ne = g.num_edges();

  const Tensor d_cat = mlp_backward(params.phi_h, cache.phi_h, d_h);
  EgclGrads out{slice_cols(d_cat, 0, d), Tensor({n, 3})};

  Tensor d_m({ne, d});
  Tensor d_s({ne, 1});
  Tensor d_diff({ne, 3});
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t i = g.edges[e].i;
    const double* up = d_cat.data() + i * (2 * d) + d;
    std::copy_n(up, d, d_m.data() + e * d);
    double ds = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      ds += cache.coef[i] * cache.diff(e, k) * d_delta_x(i, k);
      d_diff(e, k) = cache.coef[i] * cache.weights[e] * d_delta_x(i, k);
    }
    d_s[e] = ds;
  }
  if (ne > 0) {
    d_m += mlp_backward(params.phi_x, cache.phi_x, d_s);
    const Tensor d_z = mlp_backward(params.phi_e, cache.phi_e, d_m);
    for (std::size_t e = 0; e < ne; ++e) {
      const Edge& ed = g.edges[e];
      const double* row = d_z.data() + e * d_z.cols();
      double* hi = out.h.data() + ed.i * d;
      double* hj = out.h.data() + ed.j * d;
      for (std::size_t c = 0; c < d; ++c) {
        hi[c] += row[c];
        hj[c] += row[d + c];
      }
      const double dd2 = row[2 * d];
      for (std::size_t k = 0; k < 3; ++k) {
        const double g_diff = d_diff(e, k) + 2.0 * cache.diff(e, k) * dd2;
        out.x(ed.i, k) += g_diff;
        out.x(ed.j, k) -= g_diff;
      }
    }
  }
  return out;
}

EgclResult egcl(const Tensor& h, const Tensor& x, const Graph& g, const EgclParams& params) {
  EgclOutput step = egcl_step(h, x, g, params);
  return {std::move(step.h), x + step.delta_x};
}

}  // namespace mvgt

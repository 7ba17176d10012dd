#include "mvgt/layer_checks.hpp"

#include <random>

#include "mvgt/errors.hpp"
#include "mvgt/gradcheck.hpp"

namespace mvgt {

std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::GineConv:
      return "gine";
    case LayerKind::Egcl:
      return "egcl";
    case LayerKind::GineGt:
      return "gine-gt";
    case LayerKind::EgnnGt:
      return "egnn-gt";
  }
  return "?";
}

LayerKind layer_from_string(const std::string& name) {
  if (name == "gine") return LayerKind::GineConv;
  if (name == "egcl") return LayerKind::Egcl;
  if (name == "gine-gt") return LayerKind::GineGt;
  if (name == "egnn-gt") return LayerKind::EgnnGt;
  throw ConfigError("unknown layer '" + name + "' (expected gine, egcl, gine-gt or egnn-gt)");
}

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = normal(rng);
  return t;
}

double weighted_sum(const Tensor& a, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
  return s;
}

}  // namespace

LayerInstance random_layer_instance(std::uint64_t seed, std::size_t max_nodes, std::size_t max_hidden) {
  std::mt19937_64 rng(seed);
  LayerInstance inst;
  inst.nodes = std::uniform_int_distribution<std::size_t>(3, std::max<std::size_t>(3, max_nodes))(rng);
  inst.hidden = std::uniform_int_distribution<std::size_t>(4, std::max<std::size_t>(4, max_hidden))(rng);
  const std::size_t n = inst.nodes;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = unif(rng);
  inst.tuple = partition_by_threshold(a, 0.5);
  for (Graph& g : inst.tuple.views) g.edge_feat = random_tensor({g.edges.size(), kInstanceEdgeDim}, rng);
  inst.h = random_tensor({n, inst.hidden}, rng);
  inst.x = random_tensor({n, 3}, rng);
  return inst;
}

LayerCheckResult check_layer_gradients(LayerKind kind, std::uint64_t seed, double step) {
  const LayerInstance inst = random_layer_instance(seed);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  const std::size_t n = inst.nodes;
  const std::size_t d = inst.hidden;
  const Tensor r = random_tensor({n, d}, rng);
  const Tensor q = random_tensor({n, 3}, rng);
  const Graph& g = inst.tuple.views[0].edges.size() >= inst.tuple.views[1].edges.size() ? inst.tuple.views[0]
                                                                                          : inst.tuple.views[1];
  Param h_in(inst.h);
  Param x_in(inst.x);
  ParamList params;
  std::vector<std::string> names;
  auto add = [&](ParamList extra, const std::string& owner) {
    for (Param* p : extra) {
      names.push_back(owner + "[" + std::to_string(names.size()) + "]");
      params.push_back(p);
    }
  };
  std::function<double()> loss;

  GineParams gine;
  EgclParams egcl_p;
  GineGtParams gine_gt;
  EgnnGtParams egnn_gt;

  switch (kind) {
    case LayerKind::GineConv: {
      gine = GineParams::make(d, kInstanceEdgeDim, rng);
      gine.epsilon.value[0] = 0.3;
      ParamList ps;
      gine.collect(ps);
      add({&h_in}, "input_h");
      add(ps, "gine");
      loss = [&]() {
        const Tensor e = encode_edges(*gine.edge_encoder, g.edge_feat);
        return weighted_sum(gine_conv(h_in.value, g, e, gine), r);
      };
      MlpCache enc_cache;
      GineCache cache;
      const Tensor e = encode_edges(*gine.edge_encoder, g.edge_feat, &enc_cache);
      gine_conv(h_in.value, g, e, gine, &cache);
      zero_grads(params);
      GineGrads grads = gine_conv_backward(gine, g, cache, r);
      h_in.grad = grads.h;
      if (grads.edge_enc.size() > 0) mlp_backward(*gine.edge_encoder, enc_cache, grads.edge_enc);
      break;
    }
    case LayerKind::Egcl: {
      egcl_p = EgclParams::make(d, kInstanceEdgeDim, rng);
      ParamList ps;
      egcl_p.collect(ps);
      add({&h_in, &x_in}, "input");
      add(ps, "egcl");
      loss = [&]() {
        const EgclResult out = egcl(h_in.value, x_in.value, g, egcl_p);
        return weighted_sum(out.h, r) + weighted_sum(out.x, q);
      };
      EgclCache cache;
      egcl_step(h_in.value, x_in.value, g, egcl_p, &cache);
      zero_grads(params);
      EgclGrads grads = egcl_step_backward(egcl_p, g, cache, r, q);
      h_in.grad = grads.h;
      x_in.grad = grads.x + q;
      break;
    }
    case LayerKind::GineGt: {
      gine_gt = GineGtParams::make(2, d, kInstanceEdgeDim, rng);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (Param& c : gine_gt.combiner.intra) c.value[0] = unif(rng);
      for (Param& c : gine_gt.combiner.inter) c.value[0] = unif(rng);
      for (GineParams& p : gine_gt.intra) p.epsilon.value[0] = 0.5 * unif(rng);
      for (GineParams& p : gine_gt.inter) p.epsilon.value[0] = 0.5 * unif(rng);
      ParamList ps;
      gine_gt.collect(ps);
      add({&h_in}, "input_h");
      add(ps, "gine_gt");
      loss = [&]() { return weighted_sum(gine_gt_layer(h_in.value, inst.tuple, gine_gt), r); };
      GineGtCache cache;
      gine_gt_layer(h_in.value, inst.tuple, gine_gt, &cache);
      zero_grads(params);
      h_in.grad = gine_gt_backward(gine_gt, inst.tuple, cache, r);
      break;
    }
    case LayerKind::EgnnGt: {
      egnn_gt = EgnnGtParams::make(2, d, kInstanceEdgeDim, rng);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (Param& c : egnn_gt.combiner.intra) c.value[0] = unif(rng);
      for (Param& c : egnn_gt.combiner.inter) c.value[0] = unif(rng);
      ParamList ps;
      egnn_gt.collect(ps);
      add({&h_in, &x_in}, "input");
      add(ps, "egnn_gt");
      loss = [&]() {
        const EgnnGtResult out = egnn_gt_layer(h_in.value, x_in.value, inst.tuple, egnn_gt);
        return weighted_sum(out.h, r) + weighted_sum(out.x, q);
      };
      EgnnGtCache cache;
      egnn_gt_layer(h_in.value, x_in.value, inst.tuple, egnn_gt, &cache);
      zero_grads(params);
      EgnnGtGrads grads = egnn_gt_backward(egnn_gt, inst.tuple, cache, r, q);
      h_in.grad = grads.h;
      x_in.grad = grads.x;
      break;
    }
  }

  const GradCheckResult fd = finite_difference_check(params, loss, step);
  LayerCheckResult out;
  out.layer = kind;
  out.seed = seed;
  out.nodes = n;
  out.hidden = d;
  out.max_rel_error = fd.max_rel_error;
  out.worst_param = names.empty() ? "" : names[fd.worst_param];
  out.checked = fd.checked;
  return out;
}

}  // namespace mvgt

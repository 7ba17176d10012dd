#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "mvgt/errors.hpp"
#include "mvgt/gradcheck.hpp"
#include "mvgt/gt_layers.hpp"
#include "mvgt/layer_checks.hpp"
#include "mvgt/network.hpp"
#include "oracles.hpp"

using namespace mvgt;

namespace {

void set_identity(Mlp& m) {
  for (Linear& l : m.layers) {
    l.weight.value = Tensor::identity(l.weight.value.rows());
    l.bias.value.fill(0.0);
  }
}

Tensor ref_gine_gt(const Tensor& h, const GraphTuple& t, const GineGtParams& p) {
  const std::size_t k = p.num_views();
  std::vector<Tensor> enc(k);
  std::vector<Tensor> hi(k);
  Tensor out = h;
  for (std::size_t i = 0; i < k; ++i) {
    enc[i] = oracle::mlp(*p.intra[i].edge_encoder, t.views[i].edge_feat);
    hi[i] = oracle::gine(h, t.views[i], enc[i], p.intra[i]);
    out += hi[i] * p.combiner.intra[i].value[0];
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::size_t q = p.combiner.pair_index(i, j);
      out += oracle::gine(hi[i], t.views[j], enc[j], p.inter[q]) * p.combiner.inter[q].value[0];
    }
  return out;
}

oracle::EgclOut ref_egnn_gt(const Tensor& h, const Tensor& x, const GraphTuple& t, const EgnnGtParams& p) {
  const std::size_t k = p.num_views();
  std::vector<oracle::EgclOut> intra(k);
  oracle::EgclOut out{h, x};
  for (std::size_t i = 0; i < k; ++i) {
    intra[i] = oracle::egcl(h, x, t.views[i], p.egcl);
    out.h += intra[i].h * p.combiner.intra[i].value[0];
    out.x += (intra[i].x - x) * p.combiner.intra[i].value[0];
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const std::size_t q = p.combiner.pair_index(i, j);
      const oracle::EgclOut o = oracle::egcl(intra[i].h, intra[i].x, t.views[j], p.egcl);
      out.h += o.h * p.combiner.inter[q].value[0];
      out.x += (o.x - intra[i].x) * p.combiner.inter[q].value[0];
    }
  return out;
}

void randomize_combiner(GtCombiner& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Param& p : c.intra) p.value[0] = u(rng);
  for (Param& p : c.inter) p.value[0] = u(rng);
}

GraphTuple permute_tuple(const GraphTuple& t, const std::vector<std::size_t>& perm) {
  GraphTuple out = t;
  for (Graph& g : out.views) g = oracle::relabel(g, perm);
  return out;
}

}  // namespace

TEST_CASE("gine conv hand examples") {
  std::mt19937_64 rng(1);
  GineParams p = GineParams::make(1, 0, rng);
  set_identity(p.mlp);
  Graph empty;
  empty.num_nodes = 2;
  const Tensor h = Tensor::matrix({{1}, {2}});
  CHECK(gine_conv(h, empty, Tensor({0, 1}), p) == h);

  Graph one;
  one.num_nodes = 2;
  one.edges = {{0, 1}};
  one.edge_weight = {1.0};
  const Tensor out = gine_conv(h, one, Tensor({1, 1}), p);
  CHECK(out(0, 0) == 3.0);
  CHECK(out(1, 0) == 2.0);
  CHECK_THROWS_AS(gine_conv(Tensor({2, 3}), one, Tensor({1, 1}), p), DimensionError);
}

TEST_CASE("layers match the loop references") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const LayerInstance inst = random_layer_instance(seed);
    std::mt19937_64 rng(seed + 100);
    const Graph& g = inst.tuple.views[1];

    GineParams gp = GineParams::make(inst.hidden, kInstanceEdgeDim, rng);
    gp.epsilon.value[0] = 0.25;
    const Tensor enc = encode_edges(*gp.edge_encoder, g.edge_feat);
    CHECK(oracle::max_abs(enc, oracle::mlp(*gp.edge_encoder, g.edge_feat)) < 1e-13);
    CHECK(oracle::max_abs(gine_conv(inst.h, g, enc, gp), oracle::gine(inst.h, g, enc, gp)) < 1e-12);

    EgclParams ep = EgclParams::make(inst.hidden, kInstanceEdgeDim, rng);
    const EgclResult er = egcl(inst.h, inst.x, g, ep);
    const oracle::EgclOut eo = oracle::egcl(inst.h, inst.x, g, ep);
    CHECK(oracle::max_abs(er.h, eo.h) < 1e-12);
    CHECK(oracle::max_abs(er.x, eo.x) < 1e-12);

    GineGtParams gt = GineGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    randomize_combiner(gt.combiner, rng);
    CHECK(oracle::max_abs(gine_gt_layer(inst.h, inst.tuple, gt), ref_gine_gt(inst.h, inst.tuple, gt)) < 1e-11);

    EgnnGtParams et = EgnnGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    randomize_combiner(et.combiner, rng);
    const EgnnGtResult r = egnn_gt_layer(inst.h, inst.x, inst.tuple, et);
    const oracle::EgclOut ro = ref_egnn_gt(inst.h, inst.x, inst.tuple, et);
    CHECK(oracle::max_abs(r.h, ro.h) < 1e-11);
    CHECK(oracle::max_abs(r.x, ro.x) < 1e-11);
  }
}

TEST_CASE("parameter bundles and initial combiner") {
  std::mt19937_64 rng(2);
  const GineGtParams g = GineGtParams::make(3, 8, 5, rng);
  CHECK(g.intra.size() + g.inter.size() == 9);
  for (const GineParams& p : g.intra) {
    CHECK(p.edge_encoder.has_value());
    CHECK(p.epsilon.value[0] == 0.0);
    CHECK(p.edge_encoder->out_dim() == 8);
  }
  for (const GineParams& p : g.inter) CHECK_FALSE(p.edge_encoder.has_value());
  CHECK(g.combiner.intra.size() == 3);
  CHECK(g.combiner.inter.size() == 6);
  for (const Param& c : g.combiner.intra) CHECK(c.value[0] == doctest::Approx(1.0 / 3.0));
  for (const Param& c : g.combiner.inter) CHECK(c.value[0] == 0.0);

  std::set<std::size_t> slots;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) slots.insert(g.combiner.pair_index(i, j));
  CHECK(slots == std::set<std::size_t>{0, 1, 2, 3, 4, 5});

  const EgclParams e = EgclParams::make(8, 5, rng);
  CHECK(e.phi_e.in_dim() == 2 * 8 + 1 + 5);
  CHECK(e.phi_h.in_dim() == 16);
  CHECK(e.phi_x.out_dim() == 1);
  CHECK(e.edge_dim() == 5);
}

TEST_CASE("zero combiners give the residual identity exactly") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LayerInstance inst = random_layer_instance(seed);
    std::mt19937_64 rng(seed);
    GineGtParams g = GineGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    g.combiner.set_all(0.0);
    CHECK(gine_gt_layer(inst.h, inst.tuple, g) == inst.h);
    EgnnGtParams e = EgnnGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    e.combiner.set_all(0.0);
    const EgnnGtResult r = egnn_gt_layer(inst.h, inst.x, inst.tuple, e);
    CHECK(r.h == inst.h);
    CHECK(r.x == inst.x);
  }
}

TEST_CASE("an empty second view collapses to a scaled single-view residual") {
  const LayerInstance inst = random_layer_instance(21);
  GraphTuple t = inst.tuple;
  t.views[1].edges.clear();
  t.views[1].edge_weight.clear();
  t.views[1].edge_feat = Tensor({0, kInstanceEdgeDim});
  std::mt19937_64 rng(3);
  GineGtParams g = GineGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
  g.combiner.set_all(0.0);
  g.combiner.intra[0].value[0] = 0.7;
  const Tensor enc = encode_edges(*g.intra[0].edge_encoder, t.views[0].edge_feat);
  const Tensor expect = inst.h + gine_conv(inst.h, t.views[0], enc, g.intra[0]) * 0.7;
  CHECK(oracle::max_abs(gine_gt_layer(inst.h, t, g), expect) < 1e-14);
}

TEST_CASE("inter-view terms depend on the view order") {
  int changed = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LayerInstance inst = random_layer_instance(seed);
    std::mt19937_64 rng(seed);
    GineGtParams g = GineGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    // the same weights everywhere isolates the effect of the edge sets
    for (std::size_t i = 1; i < g.intra.size(); ++i) g.intra[i] = g.intra[0];
    g.inter[1] = g.inter[0];
    g.combiner.set_all(0.0);
    g.combiner.inter[g.combiner.pair_index(0, 1)].value[0] = 1.0;
    GraphTuple swapped = inst.tuple;
    std::swap(swapped.views[0], swapped.views[1]);
    if (oracle::max_abs(gine_gt_layer(inst.h, inst.tuple, g), gine_gt_layer(inst.h, swapped, g)) > 1e-9) ++changed;
  }
  CHECK(changed >= 8);
}

TEST_CASE("egcl edge cases") {
  std::mt19937_64 rng(4);
  const EgclParams p = EgclParams::make(3, 0, rng);
  Graph none;
  none.num_nodes = 1;
  const Tensor h = Tensor::matrix({{0.1, -0.2, 0.3}});
  const Tensor x = Tensor::matrix({{1, 2, 3}});
  const EgclResult r = egcl(h, x, none, p);
  CHECK(r.x == x);
  const Tensor zeros({1, 3});
  CHECK(oracle::max_abs(r.h, oracle::mlp(p.phi_h, concat_cols({&h, &zeros}))) < 1e-14);

  Graph pair;
  pair.num_nodes = 2;
  pair.edges = {{0, 1}, {1, 0}};
  pair.edge_weight = {0, 0};
  pair.edge_feat = Tensor({2, 0});
  const Tensor same = Tensor::matrix({{1, 1, 1}, {1, 1, 1}});
  CHECK(egcl(Tensor({2, 3}, 0.5), same, pair, p).x == same);
}

TEST_CASE("layer gradients match finite differences") {
  for (LayerKind k : {LayerKind::GineConv, LayerKind::Egcl, LayerKind::GineGt, LayerKind::EgnnGt}) {
    for (std::uint64_t seed = 50; seed < 54; ++seed) {
      const LayerCheckResult r = check_layer_gradients(k, seed);
      INFO(to_string(k), " seed ", seed, " worst ", r.worst_param);
      CHECK(r.max_rel_error < 1e-5);
      CHECK(r.checked > 0);
    }
  }
  CHECK_THROWS_AS(layer_from_string("gcn"), ConfigError);
}

TEST_CASE("equivariance and permutation equivariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LayerInstance inst = random_layer_instance(seed);
    std::mt19937_64 rng(seed + 7);
    EgnnGtParams e = EgnnGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    randomize_combiner(e.combiner, rng);
    const Eigen::Matrix3d q = oracle::random_orthogonal(rng, seed % 2 == 0);
    const Eigen::Vector3d t(0.3, -1.2, 2.0);
    const EgnnGtResult a = egnn_gt_layer(inst.h, inst.x, inst.tuple, e);
    const EgnnGtResult b = egnn_gt_layer(inst.h, oracle::rigid(inst.x, q, t), inst.tuple, e);
    CHECK(oracle::max_abs(b.h, a.h) < 1e-9);
    CHECK(oracle::max_abs(b.x, oracle::rigid(a.x, q, t)) < 1e-9);

    const auto perm = oracle::random_permutation(inst.nodes, rng);
    const GraphTuple pt = permute_tuple(inst.tuple, perm);
    const EgnnGtResult c = egnn_gt_layer(oracle::permute_rows(inst.h, perm), oracle::permute_rows(inst.x, perm), pt, e);
    CHECK(oracle::max_abs(c.h, oracle::permute_rows(a.h, perm)) < 1e-12);
    CHECK(oracle::max_abs(c.x, oracle::permute_rows(a.x, perm)) < 1e-12);

    GineGtParams g = GineGtParams::make(2, inst.hidden, kInstanceEdgeDim, rng);
    randomize_combiner(g.combiner, rng);
    CHECK(oracle::max_abs(gine_gt_layer(oracle::permute_rows(inst.h, perm), pt, g),
                          oracle::permute_rows(gine_gt_layer(inst.h, inst.tuple, g), perm)) < 1e-12);
  }
}

TEST_CASE("pooling") {
  CHECK(global_mean_pool(Tensor::matrix({{1, 2}, {1, 2}})) == Tensor::vector({1, 2}));
  CHECK(global_mean_pool(Tensor::matrix({{0, 2}, {2, 0}})) == Tensor::vector({1, 1}));
  CHECK_THROWS_AS(global_mean_pool(Tensor({0, 2})), DomainError);
  std::mt19937_64 rng(5);
  const LayerInstance inst = random_layer_instance(5);
  const auto perm = oracle::random_permutation(inst.nodes, rng);
  CHECK(oracle::max_abs(global_mean_pool(inst.h), global_mean_pool(oracle::permute_rows(inst.h, perm))) < 1e-14);
}

TEST_CASE("view count mismatch is a config error") {
  const LayerInstance inst = random_layer_instance(6);
  std::mt19937_64 rng(6);
  const GineGtParams g = GineGtParams::make(3, inst.hidden, kInstanceEdgeDim, rng);
  CHECK_THROWS_AS(gine_gt_layer(inst.h, inst.tuple, g), ConfigError);
  const EgnnGtParams e = EgnnGtParams::make(1, inst.hidden, kInstanceEdgeDim, rng);
  CHECK_THROWS_AS(egnn_gt_layer(inst.h, inst.x, inst.tuple, e), ConfigError);
}

namespace {

GraphInput network_input(std::uint64_t seed, std::size_t node_in) {
  const LayerInstance inst = random_layer_instance(seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GraphInput in;
  in.node_feat = Tensor({inst.nodes, node_in});
  for (double& v : in.node_feat.values()) v = normal(rng);
  in.positions = inst.x;
  in.tuple = inst.tuple;
  return in;
}

}  // namespace

TEST_CASE("network gradients and serialization") {
  for (Backbone b : {Backbone::Gine, Backbone::Egnn}) {
    NetworkSpec s;
    s.backbone = b;
    s.node_in = 4;
    s.edge_in = kInstanceEdgeDim;
    s.hidden = 6;
    s.layers = 2;
    s.targets = 2;
    s.head_layers = b == Backbone::Gine ? 3 : 2;
    Network net(s, 17);
    for (GineGtParams& l : net.gine_layers()) {
      std::mt19937_64 rng(1);
      randomize_combiner(l.combiner, rng);
    }
    for (EgnnGtParams& l : net.egnn_layers()) {
      std::mt19937_64 rng(1);
      randomize_combiner(l.combiner, rng);
    }
    const GraphInput in = network_input(31, 4);
    const Tensor w = Tensor::vector({0.7, -1.3});
    NetworkCache cache;
    net.forward(in, &cache);
    ParamList ps = net.parameters();
    zero_grads(ps);
    net.backward(in, cache, w);
    const GradCheckResult r = finite_difference_check(ps, [&] { return dot(net.forward(in), w); });
    INFO(to_string(b));
    CHECK(r.max_rel_error < 1e-5);

    const Network copy = Network::from_json(nlohmann::json::parse(net.to_json().dump()));
    CHECK(copy.forward(in) == net.forward(in));

    // a single-view network consumes a one-view tuple
    NetworkSpec one = s;
    one.views = 1;
    GraphInput single = in;
    single.tuple.views.pop_back();
    CHECK_NOTHROW(Network(one, 3).forward(single));
    CHECK_THROWS_AS(Network(one, 3).forward(in), ConfigError);
  }
  nlohmann::json bad = Network(NetworkSpec{}, 1).to_json();
  bad["parameters"].erase(0);
  CHECK_THROWS_AS(Network::from_json(bad), SchemaError);
}

TEST_CASE("snapshot and restore round trip") {
  NetworkSpec s;
  s.node_in = 3;
  s.edge_in = kInstanceEdgeDim;
  s.hidden = 5;
  Network net(s, 2);
  const auto snap = net.snapshot();
  for (Param* p : net.parameters()) p->value.fill(0.25);
  net.restore(snap);
  CHECK(net.snapshot() == snap);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mvgt/errors.hpp"
#include "mvgt/gradcheck.hpp"
#include "mvgt/loss.hpp"
#include "mvgt/mlp.hpp"
#include "mvgt/optim.hpp"
#include "mvgt/tensor.hpp"
#include "oracles.hpp"

using namespace mvgt;

namespace {

Tensor uniform(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = u(rng);
  return t;
}

Mlp one_layer(const Tensor& w, const Tensor& b, bool final_relu) {
  Mlp m;
  m.activation = Activation::ReLU;
  m.final_activation = final_relu;
  Linear l;
  l.weight = Param(w);
  l.bias = Param(b);
  m.layers.push_back(l);
  return m;
}

}  // namespace

TEST_CASE("tensor shape checks") {
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  Tensor a({2, 3}, 1.0);
  CHECK(a.size() == 6);
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK_THROWS_AS(a += Tensor({3, 2}), DimensionError);
  CHECK_THROWS_AS(matmul(a, a), DimensionError);
}

TEST_CASE("matmul variants agree with loops") {
  std::mt19937_64 rng(1);
  const Tensor a = uniform({4, 5}, rng);
  const Tensor b = uniform({5, 3}, rng);
  Tensor ref({4, 3});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 5; ++k) ref(i, j) += a(i, k) * b(k, j);
  CHECK(oracle::max_abs(matmul(a, b), ref) < 1e-14);
  CHECK(oracle::max_abs(matmul_tn(transpose(a), b), ref) < 1e-14);
  CHECK(oracle::max_abs(matmul_nt(a, transpose(b)), ref) < 1e-14);
}

TEST_CASE("row helpers") {
  const Tensor a = Tensor::matrix({{1, 2}, {3, 4}, {5, 6}});
  const std::vector<std::size_t> idx = {2, 0, 2};
  const Tensor g = gather_rows(a, idx);
  CHECK(g == Tensor::matrix({{5, 6}, {1, 2}, {5, 6}}));
  Tensor out({3, 2});
  scatter_add_rows(out, idx, g);
  CHECK(out == Tensor::matrix({{1, 2}, {0, 0}, {10, 12}}));
  CHECK(column_sum(a) == Tensor::vector({9, 12}));
  const Tensor c = concat_cols({&a, &a});
  CHECK(c.cols() == 4);
  CHECK(slice_cols(c, 2, 4) == a);
  CHECK(dot(a, a) == doctest::Approx(91.0));
}

TEST_CASE("mlp forward examples") {
  const Tensor eye = Tensor::identity(2);
  const Tensor zero2({2});
  CHECK(mlp_forward(one_layer(eye, zero2, false), Tensor::matrix({{1, 2}})) == Tensor::matrix({{1, 2}}));
  CHECK(mlp_forward(one_layer(eye, zero2, true), Tensor::matrix({{-1, 2}})) == Tensor::matrix({{0, 2}}));

  Mlp two;
  two.activation = Activation::ReLU;
  two.layers = {one_layer(Tensor::matrix({{2}}), Tensor::vector({-1}), false).layers[0],
                one_layer(Tensor::matrix({{3}}), Tensor::vector({0}), false).layers[0]};
  CHECK(mlp_forward(two, Tensor::matrix({{2}}))(0, 0) == doctest::Approx(9.0));
  CHECK_THROWS_AS(mlp_forward(two, Tensor::matrix({{1, 2}})), DimensionError);
}

TEST_CASE("identity weights pass nonnegative inputs through ReLU stacks") {
  Mlp m;
  m.activation = Activation::ReLU;
  for (int l = 0; l < 3; ++l) m.layers.push_back(one_layer(Tensor::identity(4), Tensor({4}), false).layers[0]);
  std::mt19937_64 rng(3);
  const Tensor x = uniform({5, 4}, rng, 0.0, 1.0);
  CHECK(mlp_forward(m, x) == x);
}

TEST_CASE("mlp forward matches the scalar reference") {
  std::mt19937_64 rng(5);
  for (Activation a : {Activation::ReLU, Activation::SiLU}) {
    for (bool fin : {false, true}) {
      const Mlp m({6, 7, 3}, a, fin, rng);
      const Tensor x = uniform({4, 6}, rng);
      CHECK(oracle::max_abs(mlp_forward(m, x), oracle::mlp(m, x)) < 1e-13);
    }
  }
}

TEST_CASE("mlp backward: linear layer calculus and zero upstream") {
  Mlp m = one_layer(Tensor::matrix({{1, 2}, {3, 4}, {5, 6}}), Tensor({3}), false);
  const Tensor x = Tensor::matrix({{1, -1}});
  MlpCache cache;
  mlp_forward(m, x, &cache);
  ParamList ps;
  m.collect(ps);
  zero_grads(ps);
  const Tensor g = Tensor::matrix({{1, 0, 2}});
  const Tensor dx = mlp_backward(m, cache, g);
  CHECK(dx == Tensor::matrix({{11, 14}}));  // W^T g
  CHECK(m.layers[0].weight.grad == Tensor::matrix({{1, -1}, {0, 0}, {2, -2}}));  // g x^T
  CHECK(m.layers[0].bias.grad == Tensor::vector({1, 0, 2}));

  zero_grads(ps);
  const Tensor dz = mlp_backward(m, cache, Tensor({1, 3}));
  CHECK(dz.squared_norm() == 0.0);
  for (Param* p : ps) CHECK(p->grad.squared_norm() == 0.0);
}

TEST_CASE("mlp gradients match finite differences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    Mlp m({5, 6, 6, 2}, trial % 2 ? Activation::SiLU : Activation::ReLU, trial % 3 == 0, rng);
    Param x(uniform({3, 5}, rng));
    const Tensor r = uniform({3, 2}, rng);
    ParamList ps{&x};
    m.collect(ps);
    auto loss = [&]() { return dot(mlp_forward(m, x.value), r); };
    MlpCache cache;
    mlp_forward(m, x.value, &cache);
    zero_grads(ps);
    x.grad = mlp_backward(m, cache, r);
    const GradCheckResult res = finite_difference_check(ps, loss);
    CHECK(res.max_rel_error < 1e-6);
  }
}

TEST_CASE("finite difference oracle examples") {
  Param theta = Param::scalar(3.0);
  theta.grad[0] = 6.0;
  auto sq = [&]() { return theta.value[0] * theta.value[0]; };
  CHECK(finite_difference_check({&theta}, sq).max_rel_error < 1e-9);

  theta.grad[0] = 0.0;
  CHECK(finite_difference_check({&theta}, [] { return 4.0; }).max_rel_error == 0.0);
  CHECK_THROWS_AS(finite_difference_check({&theta}, [] { return NAN; }), NumericError);
}

TEST_CASE("adam first step and weight decay variants") {
  Param p = Param::scalar(0.0);
  p.grad[0] = 1.0;
  OptimizerConfig c;
  c.lr = 0.1;
  Optimizer adam(c, {&p});
  adam.step();
  CHECK(p.value[0] == doctest::Approx(-0.1).epsilon(1e-7));
  CHECK(adam.step_count() == 1);

  Param z = Param::scalar(2.0);
  Optimizer still(c, {&z});
  still.step();
  CHECK(z.value[0] == 2.0);

  // weight_decay = 0: Adam and AdamW coincide
  std::mt19937_64 rng(9);
  Param a(uniform({4}, rng));
  Param b = a;
  OptimizerConfig cw = c;
  cw.kind = OptimizerKind::AdamW;
  Optimizer oa(c, {&a});
  Optimizer ob(cw, {&b});
  for (int s = 0; s < 5; ++s) {
    a.grad = uniform({4}, rng);
    b.grad = a.grad;
    oa.step();
    ob.step();
  }
  CHECK(a.value == b.value);

  // decoupled decay with zero gradient shrinks theta by lr * wd
  Param w = Param::scalar(1.0);
  cw.weight_decay = 0.1;
  Optimizer od(cw, {&w});
  od.step();
  CHECK(w.value[0] == doctest::Approx(0.99));

  // coupled decay turns into a gradient: the first Adam step moves by about lr
  Param u = Param::scalar(1.0);
  OptimizerConfig cl = c;
  cl.weight_decay = 0.1;
  Optimizer ol(cl, {&u});
  ol.step();
  CHECK(u.value[0] == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("optimizer rejects bad gradients without touching parameters") {
  Param p(Tensor::vector({1, 2}));
  p.grad = Tensor::vector({0.5, NAN});
  Optimizer o(OptimizerConfig{}, {&p});
  CHECK_THROWS_AS(o.step(), NumericError);
  CHECK(p.value == Tensor::vector({1, 2}));
  CHECK(o.step_count() == 0);
  p.grad = Tensor::vector({1, 2, 3});
  CHECK_THROWS_AS(o.step(), DimensionError);
}

TEST_CASE("optimizer runs are reproducible") {
  auto run = [] {
    std::mt19937_64 rng(11);
    Param p(uniform({8}, rng));
    Optimizer o(OptimizerConfig{}, {&p});
    for (int s = 0; s < 10; ++s) {
      p.grad = uniform({8}, rng);
      o.step();
    }
    return p.value;
  };
  CHECK(run() == run());
}

TEST_CASE("plateau scheduler") {
  PlateauScheduler s{1e-2, 0.8, 5, 1e-5};
  double lr = 0.0;
  for (int e = 0; e < 10; ++e) lr = s.step(1.0 - 0.01 * e);
  CHECK(lr == 1e-2);

  PlateauScheduler p{1e-2, 0.8, 5, 1e-5};
  p.step(1.0);
  for (int e = 0; e < 4; ++e) CHECK(p.step(1.0) == 1e-2);
  CHECK(p.step(1.0) == doctest::Approx(8e-3));

  PlateauScheduler f{1e-5, 0.8, 5, 1e-5};
  f.step(1.0);
  for (int e = 0; e < 12; ++e) CHECK(f.step(2.0) == 1e-5);

  // non-increasing and floored on a random metric stream
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PlateauScheduler r{5e-3, 0.7, 5, 1e-5};
  double prev = r.lr;
  for (int e = 0; e < 500; ++e) {
    const double now = r.step(u(rng));
    CHECK(now <= prev);
    CHECK(now >= 1e-5);
    prev = now;
  }
}

TEST_CASE("losses") {
  const Tensor p = Tensor::vector({0, 2});
  const Tensor t = Tensor::vector({1, 0});
  CHECK(l1_loss(p, t).value == doctest::Approx(1.5));
  CHECK(mse_loss(p, t).value == doctest::Approx(2.5));
  CHECK(l1_loss(p, p).value == 0.0);
  CHECK(mse_loss(p, p).value == 0.0);
  CHECK(l1_loss(p, p).grad == Tensor::vector({0, 0}));
  CHECK(l1_loss(p, t).grad == Tensor::vector({-0.5, 0.5}));
  CHECK(mse_loss(p, t).grad == Tensor::vector({-1, 2}));
  CHECK_THROWS_AS(l1_loss(Tensor({0}), Tensor({0})), DomainError);
  CHECK_THROWS_AS(mse_loss(p, Tensor::vector({1})), DimensionError);
}

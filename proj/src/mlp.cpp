#include "mvgt/mlp.hpp"

#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt {

void zero_grads(const ParamList& params) {
  for (Param* p : params) p->zero_grad();
}

std::size_t parameter_count(const ParamList& params) {
  std::size_t n = 0;
  for (const Param* p : params) n += p->value.size();
  return n;
}

std::string to_string(Activation a) { return a == Activation::ReLU ? "relu" : "silu"; }

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "silu") return Activation::SiLU;
  throw ConfigError("unknown activation '" + name + "'");
}

Linear make_linear(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor w({out, in});
  for (double& v : w.values()) v = dist(rng);
  return Linear{Param(std::move(w)), Param(Tensor({out}))};
}

Mlp::Mlp(const std::vector<std::size_t>& dims, Activation act, bool final_act, std::mt19937_64& rng)
    : activation(act), final_activation(final_act) {
  if (dims.size() < 2) throw ConfigError("an MLP needs at least an input and an output width");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) layers.push_back(make_linear(dims[i], dims[i + 1], rng));
}

void Mlp::collect(ParamList& out) {
  for (Linear& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::ReLU:
      return z > 0.0 ? z : 0.0;
    case Activation::SiLU:
      return z / (1.0 + std::exp(-z));
  }
  return z;
}

double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::ReLU:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::SiLU: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 + z * (1.0 - s));
    }
  }
  return 1.0;
}

Tensor mlp_forward(const Mlp& mlp, const Tensor& x, MlpCache* cache) {
  if (x.rank() != 2 || x.cols() != mlp.in_dim()) {
    throw DimensionError("mlp_forward: input " + shape_string(x.shape()) + " but MLP expects width " +
                         std::to_string(mlp.in_dim()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->preactivations.clear();
  }
  Tensor h = x;
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    const Linear& layer = mlp.layers[l];
    Tensor z = matmul_nt(h, layer.weight.value);
    const std::size_t out = layer.out_dim();
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t j = 0; j < out; ++j) z(i, j) += layer.bias.value[j];
    const bool act = l + 1 < mlp.layers.size() || mlp.final_activation;
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->preactivations.push_back(z);
    }
    if (act) {
      for (double& v : z.values()) v = activate(mlp.activation, v);
    }
    h = std::move(z);
  }
  return h;
}

Tensor mlp_backward(Mlp& mlp, const MlpCache& cache, const Tensor& upstream) {
  if (cache.inputs.size() != mlp.layers.size()) throw DimensionError("mlp_backward: cache does not match MLP");
  const Tensor& last = cache.preactivations.back();
  if (upstream.shape() != last.shape()) {
    throw DimensionError("mlp_backward: upstream " + shape_string(upstream.shape()) + " vs output " +
                         shape_string(last.shape()));
  }
  Tensor g = upstream;
  for (std::size_t l = mlp.layers.size(); l-- > 0;) {
    Linear& layer = mlp.layers[l];
    const bool act = l + 1 < mlp.layers.size() || mlp.final_activation;
    if (act) {
      const Tensor& z = cache.preactivations[l];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= activate_derivative(mlp.activation, z[i]);
    }
    layer.weight.grad += matmul_tn(g, cache.inputs[l]);
    layer.bias.grad += column_sum(g);
    g = matmul(g, layer.weight.value);
  }
  return g;
}

}  // namespace mvgt

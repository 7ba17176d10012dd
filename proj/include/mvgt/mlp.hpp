#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mvgt/tensor.hpp"

namespace mvgt {

/// A trainable tensor with its gradient accumulator.
struct Param {
  Tensor value;
  Tensor grad;

  Param() = default;
  explicit Param(Tensor v) : value(std::move(v)), grad(value.shape()) {}
  static Param scalar(double v) { return Param(Tensor({1}, v)); }

  void zero_grad() { grad.fill(0.0); }
};

using ParamList = std::vector<Param*>;

void zero_grads(const ParamList& params);
std::size_t parameter_count(const ParamList& params);

enum class Activation { ReLU, SiLU };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct Linear {
  Param weight;  // out x in
  Param bias;    // out

  std::size_t in_dim() const { return weight.value.cols(); }
  std::size_t out_dim() const { return weight.value.rows(); }
};

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), zero bias.
Linear make_linear(std::size_t in, std::size_t out, std::mt19937_64& rng);

/// Stack of affine layers. The activation is applied between layers and,
/// when `final_activation` is set, after the last one as well.
struct Mlp {
  std::vector<Linear> layers;
  Activation activation = Activation::ReLU;
  bool final_activation = false;

  Mlp() = default;
  Mlp(const std::vector<std::size_t>& dims, Activation act, bool final_act, std::mt19937_64& rng);

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }

  void collect(ParamList& out);
};

/// Intermediate values needed by the backward pass.
struct MlpCache {
  std::vector<Tensor> inputs;       // input of each affine layer
  std::vector<Tensor> preactivations;
};

/// x is batch x in. Returns batch x out.
Tensor mlp_forward(const Mlp& mlp, const Tensor& x, MlpCache* cache = nullptr);

/// Accumulates parameter gradients into `mlp` and returns d loss / d x.
Tensor mlp_backward(Mlp& mlp, const MlpCache& cache, const Tensor& upstream);

double activate(Activation a, double z);
double activate_derivative(Activation a, double z);

}  // namespace mvgt

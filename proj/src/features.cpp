#include "mvgt/features.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "mvgt/errors.hpp"

namespace mvgt {

Tensor binary_expansion(double x, std::size_t dim) {
  if (dim < 3) throw DomainError("binary_expansion: dim must be at least 3");
  if (!std::isfinite(x)) throw DomainError("binary_expansion: non-finite input");
  const std::size_t bits = dim - 1;
  const std::size_t int_bits = bits / 2;
  const std::size_t frac_bits = bits - int_bits;
  if (int_bits > 62 || frac_bits > 62) throw DomainError("binary_expansion: dim too large");
  const double mag = std::abs(x);
  if (mag >= std::ldexp(1.0, static_cast<int>(int_bits))) {
    throw DomainError("binary_expansion: |x| = " + std::to_string(mag) + " overflows " +
                      std::to_string(int_bits) + " integer bits");
  }
  Tensor out({dim});
  out[0] = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  const double ip = std::floor(mag);
  const auto int_part = static_cast<std::uint64_t>(ip);
  const auto frac_part = static_cast<std::uint64_t>(std::floor(std::ldexp(mag - ip, static_cast<int>(frac_bits))));
  for (std::size_t b = 0; b < int_bits; ++b) {
    out[1 + b] = static_cast<double>((int_part >> (int_bits - 1 - b)) & 1u);
  }
  for (std::size_t b = 0; b < frac_bits; ++b) {
    out[1 + int_bits + b] = static_cast<double>((frac_part >> (frac_bits - 1 - b)) & 1u);
  }
  return out;
}

Tensor rbf_encode(double d, std::size_t dim, double r_max) {
  if (dim < 2) throw DomainError("rbf_encode: dim must be at least 2");
  if (!(r_max > 0.0)) throw DomainError("rbf_encode: r_max must be positive");
  if (!(d >= 0.0)) throw DomainError("rbf_encode: distance must be non-negative");
  const double spacing = r_max / static_cast<double>(dim - 1);
  Tensor out({dim});
  for (std::size_t k = 0; k < dim; ++k) {
    const double off = d - spacing * static_cast<double>(k);
    out[k] = std::exp(-off * off / (2.0 * spacing * spacing));
  }
  return out;
}

Tensor binary_node_features(const Tensor& interaction, std::size_t dim) {
  const std::size_t n = interaction.rows();
  Tensor out({n, dim});
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor row = binary_expansion(interaction(i, i), dim);
    std::copy(row.data(), row.data() + dim, out.data() + i * dim);
  }
  return out;
}

void attach_binary_edge_features(Graph& g, std::size_t dim) {
  g.edge_feat = Tensor({g.num_edges(), dim});
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Tensor row = binary_expansion(g.edge_weight[e], dim);
    std::copy(row.data(), row.data() + dim, g.edge_feat.data() + e * dim);
  }
}

void attach_rbf_edge_features(Graph& g, std::size_t dim, double r_max) {
  g.edge_feat = Tensor({g.num_edges(), dim});
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Tensor row = rbf_encode(g.edge_weight[e], dim, r_max);
    std::copy(row.data(), row.data() + dim, g.edge_feat.data() + e * dim);
  }
}

}  // namespace mvgt

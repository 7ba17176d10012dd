#pragma once

#include <cstddef>

#include "mvgt/graph.hpp"
#include "mvgt/tensor.hpp"

namespace mvgt {

inline constexpr std::size_t kBinaryExpansionDim = 100;
inline constexpr std::size_t kRbfDim = 32;

/// Fixed-point bit encoding of a scalar. Slot 0 holds sign(x) in {-1, 0, 1};
/// the remaining dim-1 slots hold the bits of |x|, most significant first,
/// with (dim-1)/2 integer bits followed by the fractional bits. For the
/// default width that is 49 integer and 50 fractional bits, so the 2^0 bit
/// sits in slot 49. Throws DomainError when |x| does not fit.
Tensor binary_expansion(double x, std::size_t dim = kBinaryExpansionDim);

/// Gaussian radial basis: exp(-(d - mu_k)^2 / (2 delta^2)) with mu_k evenly
/// spaced on [0, r_max] and delta the center spacing.
Tensor rbf_encode(double d, std::size_t dim, double r_max);

/// Per-node binary expansion of the interaction diagonal: n x dim.
Tensor binary_node_features(const Tensor& interaction, std::size_t dim = kBinaryExpansionDim);

/// Sets `edge_feat` to the binary expansion of each edge weight.
void attach_binary_edge_features(Graph& g, std::size_t dim = kBinaryExpansionDim);
/// Sets `edge_feat` to the RBF encoding of each edge weight (a distance).
void attach_rbf_edge_features(Graph& g, std::size_t dim, double r_max);

}  // namespace mvgt

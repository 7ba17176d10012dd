#pragma once

#include <cstdint>
#include <vector>

#include "mvgt/dataset.hpp"

namespace mvgt {

struct MoleculeGenOptions {
  std::size_t min_atoms = 4;
  std::size_t max_atoms = 8;
  double min_distance = 0.8;
  std::size_t max_retries = 1000;  // placement attempts per atom
};

/// Random molecules: charges from {1, 6, 7, 8, 16}, positions in a box of
/// side 2 n^(1/3) + 1 with every pair at least `min_distance` apart.
/// Targets are smooth functionals of the Coulomb spectrum, see
/// `molecule_targets`. Throws GenerationError when placement keeps failing.
std::vector<Sample> generate_synthetic_molecules(std::size_t count, std::uint64_t seed,
                                                 const MoleculeGenOptions& opts = {});

/// For Coulomb eigenvalues l_1..l_n:
///   t0 = mean_k softplus(l_k / 25)
///   t1 = mean_k softplus(-l_k / 5)
///   t2 = softplus((l_max - l_min) / 100)
Tensor molecule_targets(const Tensor& charges, const Tensor& positions);

struct CloudGenOptions {
  std::size_t points = 32;
  double box = 10.0;
  std::size_t clusters = 3;
};

/// Clustered point clouds with targets (omega_m, sigma_8) drawn uniformly
/// from [0.1, 0.5] x [0.6, 1.0]. A fraction 0.2 + 1.2 (omega_m - 0.1) of
/// the points is spread around random cluster centers with standard
/// deviation 0.6 / sigma_8; the rest is uniform in the box.
std::vector<Sample> generate_point_clouds(std::size_t count, std::uint64_t seed, const CloudGenOptions& opts = {});

/// x ~ N(0, Sigma), y = M* x + eps with eps ~ N(0, noise_var I), and the
/// analytic H0-vs-HGt oracle risk gap recorded in the header.
Dataset generate_planted_filter_dataset(const theory::ShiftPair& shifts, const std::vector<double>& q, double alpha,
                                        const theory::Matrix& sigma, double noise_var, std::size_t count,
                                        std::uint64_t seed, int degree = 2);

/// Random non-commuting instance used by `gen-data --task planted-filter`:
/// n x n uniform shift pair, Sigma = A A^T + n I, alpha = 1 and
/// q_k drawn from N(0, 1) divided by ||(S1 + S2)^k||_F, plus the analytic gap.
PlantedProblem random_planted_problem(std::size_t n, std::uint64_t seed, double noise_var = 0.01, int degree = 2);

}  // namespace mvgt

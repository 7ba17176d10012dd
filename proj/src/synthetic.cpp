#include "mvgt/synthetic.hpp"

#include <array>
#include <cmath>

#include "mvgt/errors.hpp"
#include "mvgt/graph.hpp"

namespace mvgt {

namespace {

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }

constexpr std::array<double, 5> kCharges = {1.0, 6.0, 7.0, 8.0, 16.0};

}  // namespace

Tensor molecule_targets(const Tensor& charges, const Tensor& positions) {
  const Tensor x = coulomb_matrix(PointCloud{positions, charges});
  const std::size_t n = x.rows();
  theory::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = x(i, j);
  Eigen::SelfAdjointEigenSolver<theory::Matrix> eig(m, Eigen::EigenvaluesOnly);
  const theory::Vector& l = eig.eigenvalues();
  double t0 = 0.0;
  double t1 = 0.0;
  for (Eigen::Index k = 0; k < l.size(); ++k) {
    t0 += softplus(l(k) / 25.0);
    t1 += softplus(-l(k) / 5.0);
  }
  const double inv = 1.0 / static_cast<double>(n);
  return Tensor({3}, {t0 * inv, t1 * inv, softplus((l.maxCoeff() - l.minCoeff()) / 100.0)});
}

std::vector<Sample> generate_synthetic_molecules(std::size_t count, std::uint64_t seed,
                                                 const MoleculeGenOptions& opts) {
  if (count == 0) throw GenerationError("generate_synthetic_molecules: count must be positive");
  if (opts.min_atoms < 2 || opts.max_atoms < opts.min_atoms) {
    throw GenerationError("generate_synthetic_molecules: bad atom count range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> atoms(opts.min_atoms, opts.max_atoms);
  std::uniform_int_distribution<std::size_t> element(0, kCharges.size() - 1);
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t n = atoms(rng);
    const double side = 2.0 * std::cbrt(static_cast<double>(n)) + 1.0;
    std::uniform_real_distribution<double> coord(0.0, side);
    Tensor pos({n, 3});
    Tensor z({n});
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = kCharges[element(rng)];
      bool placed = false;
      for (std::size_t attempt = 0; attempt < opts.max_retries && !placed; ++attempt) {
        for (std::size_t k = 0; k < 3; ++k) pos(i, k) = coord(rng);
        placed = true;
        for (std::size_t j = 0; j < i && placed; ++j) {
          double d2 = 0.0;
          for (std::size_t k = 0; k < 3; ++k) d2 += (pos(i, k) - pos(j, k)) * (pos(i, k) - pos(j, k));
          placed = d2 >= opts.min_distance * opts.min_distance;
        }
      }
      if (!placed) {
        throw GenerationError("generate_synthetic_molecules: could not place atom " + std::to_string(i) +
                              " of sample " + std::to_string(s));
      }
    }
    Sample sample;
    sample.targets = molecule_targets(z, pos);
    sample.charges = std::move(z);
    sample.positions = std::move(pos);
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<Sample> generate_point_clouds(std::size_t count, std::uint64_t seed, const CloudGenOptions& opts) {
  if (count == 0) throw GenerationError("generate_point_clouds: count must be positive");
  if (opts.points < 2 || opts.clusters == 0 || !(opts.box > 0.0)) {
    throw GenerationError("generate_point_clouds: bad options");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> omega(0.1, 0.5);
  std::uniform_real_distribution<double> sigma8(0.6, 1.0);
  std::uniform_real_distribution<double> coord(0.0, opts.box);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double om = omega(rng);
    const double s8 = sigma8(rng);
    const auto clustered = static_cast<std::size_t>(
        std::lround(static_cast<double>(opts.points) * (0.2 + 1.2 * (om - 0.1))));
    const double spread = 0.6 / s8;
    Tensor centers({opts.clusters, 3});
    for (double& v : centers.values()) v = coord(rng);
    Tensor pos({opts.points, 3});
    for (std::size_t i = 0; i < opts.points; ++i) {
      if (i < clustered) {
        const std::size_t c = i % opts.clusters;
        for (std::size_t k = 0; k < 3; ++k) pos(i, k) = centers(c, k) + spread * normal(rng);
      } else {
        for (std::size_t k = 0; k < 3; ++k) pos(i, k) = coord(rng);
      }
    }
    Sample sample;
    sample.positions = std::move(pos);
    sample.targets = Tensor({2}, {om, s8});
    out.push_back(std::move(sample));
  }
  return out;
}

Dataset generate_planted_filter_dataset(const theory::ShiftPair& shifts, const std::vector<double>& q, double alpha,
                                        const theory::Matrix& sigma, double noise_var, std::size_t count,
                                        std::uint64_t seed, int degree) {
  if (noise_var < 0.0) throw GenerationError("planted filter: negative noise variance");
  Dataset data;
  PlantedProblem p;
  p.shifts = shifts;
  p.sigma = sigma;
  p.q = q;
  p.alpha = alpha;
  p.noise_var = noise_var;
  p.degree = degree;
  const theory::Matrix m_star = p.oracle();
  p.analytic_gap = theory::oracle_risk_gap(m_star, degree, shifts, sigma).gap;

  const theory::Matrix l = theory::sigma_factor(sigma);
  const auto n = shifts.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(noise_var);
  theory::Vector z(n);
  for (std::size_t t = 0; t < count; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    const theory::Vector x = l * z;
    theory::Vector y = m_star * x;
    for (Eigen::Index i = 0; i < n; ++i) y(i) += sd * normal(rng);
    FilterSample s{Tensor({static_cast<std::size_t>(n)}), Tensor({static_cast<std::size_t>(n)})};
    for (Eigen::Index i = 0; i < n; ++i) {
      s.x[static_cast<std::size_t>(i)] = x(i);
      s.y[static_cast<std::size_t>(i)] = y(i);
    }
    data.filter_samples.push_back(std::move(s));
  }
  data.planted = std::move(p);
  return data;
}

PlantedProblem random_planted_problem(std::size_t n, std::uint64_t seed, double noise_var, int degree) {
  std::mt19937_64 rng(seed);
  const auto size = static_cast<Eigen::Index>(n);
  PlantedProblem p;
  p.shifts = theory::random_shift_pair(size, rng);
  p.sigma = theory::random_spd(size, rng);
  p.alpha = 1.0;
  p.noise_var = noise_var;
  p.degree = degree;
  std::normal_distribution<double> normal(0.0, 1.0);
  const theory::Matrix dense = p.shifts.s1 + p.shifts.s2;
  theory::Matrix power = theory::Matrix::Identity(size, size);
  for (int k = 0; k <= degree; ++k) {
    p.q.push_back(normal(rng) / power.norm());
    power = (power * dense).eval();
  }
  p.analytic_gap = theory::oracle_risk_gap(p.oracle(), degree, p.shifts, p.sigma).gap;
  return p;
}

}  // namespace mvgt

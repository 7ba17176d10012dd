#include "mvgt/theory.hpp"

#include <algorithm>
#include <cmath>

#include "mvgt/errors.hpp"

namespace mvgt::theory {

std::vector<Word> words_of_length(int k) {
  if (k < 0) throw DomainError("words_of_length: negative length");
  if (k > 30) throw DomainError("words_of_length: length too large to enumerate");
  std::vector<Word> out;
  const std::uint64_t count = std::uint64_t{1} << k;
  out.reserve(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    Word w(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) w[t] = ((code >> (k - 1 - t)) & 1u) ? 2 : 1;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Word> enumerate_words(int m) {
  if (m < 0) throw DomainError("enumerate_words: negative degree");
  std::vector<Word> out;
  for (int k = 0; k <= m; ++k) {
    auto level = words_of_length(k);
    out.insert(out.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  return out;
}

std::string word_to_string(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (auto c : w) s.push_back(static_cast<char>('0' + c));
  return s;
}

Matrix word_matrix(const Word& w, const ShiftPair& s) {
  Matrix out = Matrix::Identity(s.size(), s.size());
  for (auto c : w) out = (out * (c == 1 ? s.s1 : s.s2)).eval();
  return out;
}

std::string to_string(FilterClass c) {
  switch (c) {
    case FilterClass::H1:
      return "H1";
    case FilterClass::H0:
      return "H0";
    case FilterClass::HGt:
      return "HGt";
  }
  return "?";
}

Matrix sigma_factor(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw DomainError("sigma must be a non-empty square matrix");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("sigma must be symmetric");
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw DomainError("sigma must be positive definite");
  Matrix l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) throw DomainError("sigma must be positive definite");
  return l;
}

FilterBasis build_basis(FilterClass cls, int m, const ShiftPair& s, const Matrix& sigma) {
  if (m < 0) throw DomainError("build_basis: negative degree");
  if (s.s1.rows() != s.s1.cols() || s.s2.rows() != s.s1.rows() || s.s2.cols() != s.s1.cols()) {
    throw DimensionError("build_basis: shift operators must be square and of equal size");
  }
  if (sigma.rows() != s.size()) throw DimensionError("build_basis: sigma size does not match the operators");
  sigma_factor(sigma);
  FilterBasis b;
  b.cls = cls;
  b.degree = m;
  b.sigma = sigma;
  const Eigen::Index n = s.size();
  switch (cls) {
    case FilterClass::H1:
    case FilterClass::H0: {
      const Matrix op = cls == FilterClass::H1 ? s.s1 : Matrix(s.s1 + s.s2);
      Matrix power = Matrix::Identity(n, n);
      for (int k = 0; k <= m; ++k) {
        b.matrices.push_back(power);
        power = (power * op).eval();
      }
      break;
    }
    case FilterClass::HGt:
      b.words = enumerate_words(m);
      for (const Word& w : b.words) b.matrices.push_back(word_matrix(w, s));
      break;
  }
  return b;
}

double sigma_inner(const Matrix& a, const Matrix& b, const Matrix& sigma) { return (b.transpose() * a * sigma).trace(); }

double sigma_norm(const Matrix& a, const Matrix& sigma) {
  const Matrix l = sigma_factor(sigma);
  return (a * l).norm();
}

double check_nc_binomial(int m, const ShiftPair& s) {
  const Eigen::Index n = s.size();
  const Matrix dense = s.s1 + s.s2;
  Matrix power = Matrix::Identity(n, n);
  double worst = 0.0;
  for (int k = 0; k <= m; ++k) {
    Matrix sum = Matrix::Zero(n, n);
    for (const Word& w : words_of_length(k)) sum += word_matrix(w, s);
    worst = std::max(worst, (power - sum).norm());
    power = (power * dense).eval();
  }
  return worst;
}

namespace {

/// Columns vec(B_k L): the Sigma geometry becomes the Euclidean one.
Matrix whitened_columns(const std::vector<Matrix>& mats, const Matrix& l) {
  if (mats.empty()) return Matrix(l.rows() * l.rows(), 0);
  const Eigen::Index n = l.rows();
  Matrix g(n * n, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const Matrix w = mats[k] * l;
    g.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(w.data(), n * n);
  }
  return g;
}

Vector whitened(const Matrix& m, const Matrix& l) {
  const Matrix w = m * l;
  return Eigen::Map<const Vector>(w.data(), w.size());
}

/// ||Pi_{V-perp} m||^2 using a pivoted Householder QR of the basis.
double orthogonal_component_sq(const Matrix& m, const FilterBasis& basis, const Matrix& l) {
  const Matrix g = whitened_columns(basis.matrices, l);
  const Vector b = whitened(m, l);
  if (g.cols() == 0) return b.squaredNorm();
  Eigen::ColPivHouseholderQR<Matrix> qr(g);
  qr.setThreshold(1e-10);
  const Eigen::Index r = qr.rank();
  const Matrix q = qr.householderQ();
  const Vector coords = q.leftCols(r).transpose() * b;
  return (b - q.leftCols(r) * coords).squaredNorm();
}

}  // namespace

Projection sigma_project(const Matrix& m, const FilterBasis& basis) {
  const Matrix l = sigma_factor(basis.sigma);
  if (m.rows() != l.rows() || m.cols() != l.rows()) throw DimensionError("sigma_project: matrix size mismatch");
  const Matrix g = whitened_columns(basis.matrices, l);
  const Vector b = whitened(m, l);
  Projection out;
  out.coeffs = Vector::Zero(g.cols());
  if (g.cols() > 0) {
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    Vector ub = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff && sv(i) > 0.0) {
        ub(i) /= sv(i);
        ++out.rank;
      } else {
        ub(i) = 0.0;
      }
    }
    out.coeffs = svd.matrixV() * ub;
  }
  out.projection = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t k = 0; k < basis.matrices.size(); ++k) {
    out.projection += out.coeffs(static_cast<Eigen::Index>(k)) * basis.matrices[k];
  }
  out.residual_norm = ((m - out.projection) * l).norm();
  return out;
}

ExpressivityReport expressivity_report(int m, const ShiftPair& s, const Matrix& sigma,
                                       const ExpressivityTolerances& tol) {
  ExpressivityReport r;
  r.degree = m;
  const FilterBasis h1 = build_basis(FilterClass::H1, m, s, sigma);
  const FilterBasis h0 = build_basis(FilterClass::H0, m, s, sigma);
  const FilterBasis gt = build_basis(FilterClass::HGt, m, s, sigma);
  for (const Matrix& e : h1.matrices) r.max_h1_residual = std::max(r.max_h1_residual, sigma_project(e, gt).residual_norm);
  for (const Matrix& e : h0.matrices) r.max_h0_residual = std::max(r.max_h0_residual, sigma_project(e, gt).residual_norm);
  r.inclusion_holds = r.max_h1_residual <= tol.inclusion && r.max_h0_residual <= tol.inclusion;

  const Matrix comm = s.commutator();
  r.commutator_norm = sigma_norm(comm, sigma);
  r.strictness_applicable = m >= 2 && comm.norm() > tol.commuting;
  if (r.strictness_applicable) {
    r.commutator_h0_residual = sigma_project(comm, h0).residual_norm;
    r.commutator_hgt_residual = sigma_project(comm, gt).residual_norm;
    r.strictness_holds = r.commutator_h0_residual > tol.strict_ratio * r.commutator_norm &&
                         r.commutator_hgt_residual <= tol.in_span;
  }
  return r;
}

RiskGap class_distances(const Matrix& m_star, int m, const ShiftPair& s, const Matrix& sigma) {
  const Matrix l = sigma_factor(sigma);
  const FilterBasis h1 = build_basis(FilterClass::H1, m, s, sigma);
  const FilterBasis h0 = build_basis(FilterClass::H0, m, s, sigma);
  const FilterBasis gt = build_basis(FilterClass::HGt, m, s, sigma);
  RiskGap r;
  r.dist_h1 = sigma_project(m_star, h1).residual_norm;
  r.dist_h0 = sigma_project(m_star, h0).residual_norm;
  r.dist_hgt = sigma_project(m_star, gt).residual_norm;
  r.gap = r.dist_h0 * r.dist_h0 - r.dist_hgt * r.dist_hgt;
  r.orthogonal_sq = orthogonal_component_sq(m_star, h0, l);
  r.identity_residual = std::abs(r.gap - r.orthogonal_sq);
  return r;
}

RiskGap oracle_risk_gap(const Matrix& m_star, int m, const ShiftPair& s, const Matrix& sigma, double tol) {
  RiskGap r = class_distances(m_star, m, s, sigma);
  const double scale = std::max(1.0, sigma_norm(m_star, sigma));
  if (r.dist_hgt > tol * scale) {
    throw AssumptionViolation("oracle_risk_gap: oracle lies " + std::to_string(r.dist_hgt) +
                              " away from the graph-tuple filter span");
  }
  return r;
}

RiskEstimate empirical_risk_check(const Matrix& m, const Matrix& m_star, const Matrix& sigma, double noise_var,
                                  std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("empirical_risk_check: need at least one sample");
  if (noise_var < 0.0) throw DomainError("empirical_risk_check: negative noise variance");
  const Matrix l = sigma_factor(sigma);
  const Eigen::Index n = l.rows();
  if (m.rows() != n || m.cols() != n || m_star.rows() != n || m_star.cols() != n) {
    throw DimensionError("empirical_risk_check: matrix size mismatch");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(noise_var);
  const Matrix diff = m - m_star;
  double mean = 0.0;
  double m2 = 0.0;
  Vector z(n);
  Vector eps(n);
  for (std::size_t t = 0; t < samples; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = noise_sd * normal(rng);
    const Vector x = l * z;
    // M x - (M* x + eps)
    const double loss = (diff * x - eps).squaredNorm();
    const double delta = loss - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (loss - mean);
  }
  RiskEstimate r;
  r.samples = samples;
  r.empirical = mean;
  r.analytic = static_cast<double>(n) * noise_var + (diff * l).squaredNorm();
  r.standard_error = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  return r;
}

ShiftPair random_shift_pair(Eigen::Index n, std::mt19937_64& rng, bool symmetric) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&]() {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
    if (symmetric) {
      for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) a(i, j) = a(j, i);
      }
    }
    return a;
  };
  ShiftPair s;
  s.s1 = draw();
  s.s2 = draw();
  return s;
}

Matrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
  Matrix s = a * a.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
  return 0.5 * (s + s.transpose());
}

}  // namespace mvgt::theory

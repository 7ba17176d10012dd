#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mvgt::theory {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Two shift operators on a common node set (adjacency matrices of two views).
struct ShiftPair {
  Matrix s1;
  Matrix s2;

  Eigen::Index size() const { return s1.rows(); }
  Matrix commutator() const { return s1 * s2 - s2 * s1; }
};

/// A word over {1, 2}; the empty word maps to the identity.
using Word = std::vector<std::uint8_t>;

/// All words of length exactly k, lexicographic.
std::vector<Word> words_of_length(int k);
/// All 2^(m+1) - 1 words of length <= m, ordered by length then lexicographically.
std::vector<Word> enumerate_words(int m);
std::string word_to_string(const Word& w);

/// Ordered product S_{w_1} S_{w_2} ... S_{w_|w|}.
Matrix word_matrix(const Word& w, const ShiftPair& s);

enum class FilterClass { H1, H0, HGt };
std::string to_string(FilterClass c);

/// Spanning set of a filter class, with the input covariance that defines
/// the inner product <A, B>_Sigma = tr(B^T A Sigma).
struct FilterBasis {
  FilterClass cls = FilterClass::HGt;
  int degree = 0;
  std::vector<Matrix> matrices;
  std::vector<Word> words;  // HGt only
  Matrix sigma;
};

/// H1 = {S1^k}, H0 = {(S1 + S2)^k} for k = 0..m, HGt = {w(S1, S2) : |w| <= m}.
/// Throws DomainError when sigma is not symmetric positive definite.
FilterBasis build_basis(FilterClass cls, int m, const ShiftPair& s, const Matrix& sigma);

double sigma_inner(const Matrix& a, const Matrix& b, const Matrix& sigma);
double sigma_norm(const Matrix& a, const Matrix& sigma);

/// max_k ||(S1 + S2)^k - sum_{|w| = k} w(S1, S2)||_F over k = 0..m.
double check_nc_binomial(int m, const ShiftPair& s);

struct Projection {
  Vector coeffs;
  Matrix projection;     // sum_k coeffs_k B_k
  double residual_norm = 0.0;  // dist_Sigma(M, span)
  Eigen::Index rank = 0;
};

/// Sigma-weighted least-squares projection onto span(basis), through a
/// singular value decomposition with cutoff 1e-10 * sigma_max.
Projection sigma_project(const Matrix& m, const FilterBasis& basis);

struct ExpressivityReport {
  int degree = 0;
  double max_h1_residual = 0.0;   // max over H1 elements of their HGt residual
  double max_h0_residual = 0.0;   // max over H0 elements of their HGt residual
  double commutator_norm = 0.0;   // ||[S1, S2]||_{Sigma,F}
  bool strictness_applicable = false;
  double commutator_h0_residual = 0.0;
  double commutator_hgt_residual = 0.0;
  bool inclusion_holds = false;
  bool strictness_holds = false;
};

struct ExpressivityTolerances {
  double inclusion = 1e-8;
  double in_span = 1e-10;
  double strict_ratio = 1e-3;
  double commuting = 1e-12;  // ||[S1,S2]||_F below this counts as commuting
};

/// Checks H1, H0 inside HGt and, for non-commuting pairs with m >= 2, that
/// the commutator lies in HGt but not in H0.
ExpressivityReport expressivity_report(int m, const ShiftPair& s, const Matrix& sigma,
                                       const ExpressivityTolerances& tol = {});

struct RiskGap {
  double dist_h1 = 0.0;
  double dist_h0 = 0.0;
  double dist_hgt = 0.0;
  double gap = 0.0;              // dist_h0^2 - dist_hgt^2
  double orthogonal_sq = 0.0;    // ||Pi_{V-perp} M*||^2 via an orthonormal basis of V
  double identity_residual = 0.0;
};

/// Oracle risk gap between H0(m) and HGt(m) for the oracle M*. Throws
/// AssumptionViolation when M* is farther than tol * max(1, ||M*||) from
/// the HGt span.
RiskGap oracle_risk_gap(const Matrix& m_star, int m, const ShiftPair& s, const Matrix& sigma, double tol = 1e-8);

/// Same distances without the in-span precondition (misspecified oracle).
RiskGap class_distances(const Matrix& m_star, int m, const ShiftPair& s, const Matrix& sigma);

struct RiskEstimate {
  double empirical = 0.0;
  double analytic = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of E||Mx - y||^2 with x ~ N(0, Sigma), y = M* x + eps,
/// eps ~ N(0, noise_var I), against n * noise_var + ||M - M*||^2_{Sigma,F}.
RiskEstimate empirical_risk_check(const Matrix& m, const Matrix& m_star, const Matrix& sigma, double noise_var,
                                  std::size_t samples, std::uint64_t seed);

/// Entries iid uniform on [0, 1]; `symmetric` mirrors the upper triangle
/// and zeroes the diagonal (undirected adjacency).
ShiftPair random_shift_pair(Eigen::Index n, std::mt19937_64& rng, bool symmetric = false);
/// A A^T + n I with A iid uniform on [-1, 1].
Matrix random_spd(Eigen::Index n, std::mt19937_64& rng);
/// Lower Cholesky factor; DomainError if sigma is not symmetric positive definite.
Matrix sigma_factor(const Matrix& sigma);

}  // namespace mvgt::theory

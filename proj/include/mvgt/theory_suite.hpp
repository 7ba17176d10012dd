#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace mvgt::theory {

struct SuiteOptions {
  int m = 2;              // filter degree for expressivity and risk checks
  int n = 4;              // shift operator size for expressivity and risk checks
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  int max_word_degree = 8;
  int binomial_max_n = 8;
  int binomial_max_m = 4;
  std::size_t mc_samples = 100000;
  std::size_t mc_instances = 3;
};

struct SuiteResult {
  nlohmann::json report;  // {"options", "checks": [...], "pass"}
  std::string csv;        // check,pass,statistic,value,threshold
  bool pass = false;
};

/// Randomized verification of the filter-class results:
///   word_count          |W_<=m| = 2^(m+1) - 1 for m = 0..max_word_degree
///   nc_binomial         (S1+S2)^k equals the sum of its length-k words
///   inclusion           H1, H0 basis elements lie in the HGt span
///   strictness          the commutator escapes H0 but not HGt
///   gap_identity        H0-vs-HGt oracle gap equals ||Pi_{V-perp} M*||^2
///   gap_zero_alpha      no commutator term gives a zero gap
///   gap_scaling         the gap scales quadratically in the commutator weight
///   dominance           dist(M*, HGt) <= dist(M*, H0), dist(M*, H1)
///   risk_decomposition  Monte Carlo risk matches noise + Sigma-distance
/// Sigma alternates between the identity and a random SPD matrix.
SuiteResult run_theory_suite(const SuiteOptions& opts);

}  // namespace mvgt::theory

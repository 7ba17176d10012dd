#include "mvgt/theory_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "mvgt/seeding.hpp"
#include "mvgt/theory.hpp"

namespace mvgt::theory {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxListedFailures = 10;

struct Check {
  std::string name;
  std::string statistic;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool applicable = true;
  std::size_t instances = 0;
  json failures = json::array();
  json extra = json::object();

  void fail(json instance) {
    pass = false;
    if (failures.size() < kMaxListedFailures) failures.push_back(std::move(instance));
  }

  json to_json() const {
    json j{{"name", name},          {"pass", pass},         {"applicable", applicable}, {"statistic", statistic},
           {"value", value},        {"threshold", threshold}, {"instances", instances}, {"failures", failures}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Instance {
  std::uint64_t seed = 0;
  ShiftPair s;
  Matrix sigma;
  std::vector<double> q;
  double alpha = 0.0;
};

/// Seeded non-commuting pair with Sigma = I on even trials and random SPD on odd ones.
Instance make_instance(std::uint64_t seed, std::size_t trial, int n, int m) {
  Instance inst;
  inst.seed = seed;
  std::mt19937_64 rng(seed);
  inst.s = random_shift_pair(n, rng);
  inst.sigma = trial % 2 == 0 ? Matrix::Identity(n, n) : random_spd(n, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k <= std::min(m, 1); ++k) inst.q.push_back(normal(rng));
  inst.alpha = normal(rng);
  if (std::abs(inst.alpha) < 0.1) inst.alpha = inst.alpha < 0 ? -0.1 : 0.1;
  return inst;
}

Matrix planted_oracle(const Instance& inst, double alpha) {
  const Eigen::Index n = inst.s.size();
  const Matrix dense = inst.s.s1 + inst.s.s2;
  Matrix power = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n, n);
  for (double c : inst.q) {
    out += c * power;
    power = (power * dense).eval();
  }
  return out + alpha * inst.s.commutator();
}

Check word_count_check(const SuiteOptions& o) {
  Check c{"word_count", "max_abs_count_error"};
  json counts = json::array();
  for (int m = 0; m <= o.max_word_degree; ++m) {
    const auto words = enumerate_words(m);
    const double expected = std::ldexp(1.0, m + 1) - 1.0;
    const double err = std::abs(static_cast<double>(words.size()) - expected);
    c.value = std::max(c.value, err);
    counts.push_back(words.size());
    if (err != 0.0 || words.empty() || !words.front().empty()) c.fail(json{{"m", m}, {"count", words.size()}});
    ++c.instances;
  }
  c.extra["counts"] = counts;
  return c;
}

Check binomial_check(const SuiteOptions& o) {
  Check c{"nc_binomial", "max_residual", 0.0, 1e-10};
  for (std::size_t t = 0; t < o.trials; ++t) {
    const std::uint64_t seed = derive_seed(o.seed, 100000 + t);
    std::mt19937_64 rng(seed);
    const int n = std::uniform_int_distribution<int>(2, std::max(2, o.binomial_max_n))(rng);
    const int m = std::uniform_int_distribution<int>(0, std::max(0, o.binomial_max_m))(rng);
    const ShiftPair s = random_shift_pair(n, rng, t % 2 == 1);
    const double r = check_nc_binomial(m, s);
    c.value = std::max(c.value, r);
    if (!(r <= c.threshold)) c.fail(json{{"seed", seed}, {"n", n}, {"m", m}, {"residual", r}});
    ++c.instances;
  }
  return c;
}

}  // namespace

SuiteResult run_theory_suite(const SuiteOptions& o) {
  std::vector<Check> checks;
  checks.push_back(word_count_check(o));
  checks.push_back(binomial_check(o));

  Check inclusion{"inclusion", "max_residual", 0.0, 1e-8};
  Check strict{"strictness", "min_h0_ratio", std::numeric_limits<double>::infinity(), 1e-3};
  double strict_max_gt = 0.0;
  Check identity{"gap_identity", "max_abs_difference", 0.0, 1e-8};
  Check zero{"gap_zero_alpha", "max_gap", 0.0, 1e-10};
  Check scaling{"gap_scaling", "max_relative_error", 0.0, 1e-8};
  Check dominance{"dominance", "max_violation", 0.0, 0.0};
  const bool in_span = o.m >= 2;  // the commutator needs words of length 2
  strict.applicable = identity.applicable = zero.applicable = scaling.applicable = in_span;

  for (std::size_t t = 0; t < o.trials; ++t) {
    const Instance inst = make_instance(derive_seed(o.seed, t), t, o.n, o.m);
    const ExpressivityReport er = expressivity_report(o.m, inst.s, inst.sigma);
    const double inc = std::max(er.max_h0_residual, er.max_h1_residual);
    inclusion.value = std::max(inclusion.value, inc);
    ++inclusion.instances;
    if (!(inc <= inclusion.threshold)) inclusion.fail(json{{"seed", inst.seed}, {"residual", inc}});

    if (in_span) {
      ++strict.instances;
      if (!er.strictness_applicable) {
        strict.fail(json{{"seed", inst.seed}, {"reason", "commuting pair"}});
      } else {
        const double ratio = er.commutator_h0_residual / er.commutator_norm;
        strict.value = std::min(strict.value, ratio);
        strict_max_gt = std::max(strict_max_gt, er.commutator_hgt_residual);
        if (!er.strictness_holds) {
          strict.fail(json{{"seed", inst.seed}, {"h0_ratio", ratio}, {"hgt_residual", er.commutator_hgt_residual}});
        }
      }

      const Matrix m_star = planted_oracle(inst, inst.alpha);
      const RiskGap g = oracle_risk_gap(m_star, o.m, inst.s, inst.sigma);
      identity.value = std::max(identity.value, g.identity_residual);
      ++identity.instances;
      if (!(g.identity_residual <= identity.threshold)) {
        identity.fail(json{{"seed", inst.seed}, {"gap", g.gap}, {"orthogonal_sq", g.orthogonal_sq}});
      }

      const RiskGap g0 = oracle_risk_gap(planted_oracle(inst, 0.0), o.m, inst.s, inst.sigma);
      zero.value = std::max(zero.value, std::abs(g0.gap));
      ++zero.instances;
      if (!(std::abs(g0.gap) <= zero.threshold)) zero.fail(json{{"seed", inst.seed}, {"gap", g0.gap}});

      const RiskGap g3 = oracle_risk_gap(planted_oracle(inst, 3.0 * inst.alpha), o.m, inst.s, inst.sigma);
      const double rel = std::abs(g3.gap - 9.0 * g.gap) / std::max(1e-300, 9.0 * std::abs(g.gap));
      scaling.value = std::max(scaling.value, rel);
      ++scaling.instances;
      if (!(rel <= scaling.threshold)) scaling.fail(json{{"seed", inst.seed}, {"gap", g.gap}, {"gap_3alpha", g3.gap}});

      const double scale = 1e-12 * std::max(1.0, sigma_norm(m_star, inst.sigma));
      const double v = std::max(g.dist_hgt - g.dist_h0, g.dist_hgt - g.dist_h1);
      dominance.value = std::max(dominance.value, v);
      ++dominance.instances;
      if (v > scale) dominance.fail(json{{"seed", inst.seed}, {"oracle", "planted"}, {"violation", v}});
    }

    // Misspecified oracle: a dense random matrix outside every span.
    std::mt19937_64 rng(derive_seed(inst.seed, 7));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix dense(o.n, o.n);
    for (Eigen::Index i = 0; i < dense.size(); ++i) dense.data()[i] = unif(rng);
    const RiskGap gd = class_distances(dense, o.m, inst.s, inst.sigma);
    const double scale = 1e-12 * std::max(1.0, sigma_norm(dense, inst.sigma));
    const double v = std::max(gd.dist_hgt - gd.dist_h0, gd.dist_hgt - gd.dist_h1);
    dominance.value = std::max(dominance.value, v);
    ++dominance.instances;
    if (v > scale) dominance.fail(json{{"seed", inst.seed}, {"oracle", "random"}, {"violation", v}});
  }
  if (strict.instances == 0) strict.value = 0.0;
  strict.extra["max_hgt_residual"] = strict_max_gt;
  strict.extra["hgt_threshold"] = 1e-10;
  for (Check* c : {&inclusion, &strict, &identity, &zero, &scaling, &dominance}) checks.push_back(*c);

  Check risk{"risk_decomposition", "max_z_score", 0.0, 4.0};
  json cases = json::array();
  for (std::size_t i = 0; i < o.mc_instances && in_span; ++i) {
    const Instance inst = make_instance(derive_seed(o.seed, 200000 + i), i, o.n, o.m);
    const Matrix m_star = planted_oracle(inst, inst.alpha);
    Matrix m = m_star;
    Matrix sigma = inst.sigma;
    double noise = 0.0;
    std::string kind;
    switch (i % 3) {
      case 0:
        kind = "oracle";
        noise = 0.1;
        break;
      case 1:
        kind = "best_dense_graph";
        noise = 0.05;
        m = sigma_project(m_star, build_basis(FilterClass::H0, o.m, inst.s, sigma)).projection;
        break;
      default:
        kind = "identity_offset";
        sigma = Matrix::Identity(o.n, o.n);
        m = m_star + Matrix::Identity(o.n, o.n);
        break;
    }
    const RiskEstimate est = empirical_risk_check(m, m_star, sigma, noise, o.mc_samples, derive_seed(inst.seed, 11));
    const double diff = std::abs(est.empirical - est.analytic);
    const double z = est.standard_error > 0.0 ? diff / est.standard_error : (diff <= 1e-12 ? 0.0 : INFINITY);
    risk.value = std::max(risk.value, z);
    ++risk.instances;
    json entry{{"seed", inst.seed},          {"case", kind},
               {"empirical", est.empirical}, {"analytic", est.analytic},
               {"standard_error", est.standard_error}, {"samples", est.samples}};
    cases.push_back(entry);
    if (!(z <= risk.threshold)) risk.fail(entry);
  }
  {
    // Noise-free oracle: both risks vanish exactly.
    const Instance inst = make_instance(derive_seed(o.seed, 300000), 0, o.n, o.m);
    const Matrix m_star = planted_oracle(inst, inst.alpha);
    const RiskEstimate est = empirical_risk_check(m_star, m_star, inst.sigma, 0.0, 1000, inst.seed);
    ++risk.instances;
    json entry{{"seed", inst.seed}, {"case", "noise_free_oracle"}, {"empirical", est.empirical}, {"analytic", est.analytic}};
    cases.push_back(entry);
    if (est.empirical != 0.0 || est.analytic != 0.0) risk.fail(entry);
  }
  risk.extra["cases"] = cases;
  checks.push_back(risk);

  SuiteResult out;
  out.pass = true;
  json list = json::array();
  out.csv = "check,pass,statistic,value,threshold\n";
  for (const Check& c : checks) {
    out.pass = out.pass && c.pass;
    list.push_back(c.to_json());
    out.csv += c.name + "," + (c.pass ? "1" : "0") + "," + c.statistic + "," + num(c.value) + "," + num(c.threshold) + "\n";
  }
  out.report = json{{"options",
                     {{"m", o.m},
                      {"n", o.n},
                      {"trials", o.trials},
                      {"seed", o.seed},
                      {"max_word_degree", o.max_word_degree},
                      {"binomial_max_n", o.binomial_max_n},
                      {"binomial_max_m", o.binomial_max_m},
                      {"mc_samples", o.mc_samples},
                      {"mc_instances", o.mc_instances}}},
                    {"checks", list},
                    {"pass", out.pass}};
  return out;
}

}  // namespace mvgt::theory

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "mvgt/commands.hpp"
#include "mvgt/errors.hpp"
#include "mvgt/features.hpp"
#include "mvgt/metrics.hpp"
#include "mvgt/splits.hpp"
#include "mvgt/synthetic.hpp"
#include "mvgt/trainer.hpp"
#include "oracles.hpp"

using namespace mvgt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mvgt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_molecule_config() {
  ExperimentConfig c = ExperimentConfig::defaults_for(Task::Molecule);
  c.hidden = 8;
  c.folds = 3;
  c.batch_size = 4;
  c.max_epochs = 4;
  c.early_stop_patience = 0;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("metrics") {
  const Tensor target = Tensor::matrix({{0}, {2}});
  CHECK(r_squared(Tensor::matrix({{1}, {1}}), target)[0] == doctest::Approx(0.0));
  CHECK(r_squared(target, target)[0] == 1.0);
  CHECK(r_squared(Tensor::matrix({{2}, {0}}), target)[0] == doctest::Approx(-3.0));
  CHECK_THROWS_AS(r_squared(Tensor::matrix({{1}}), Tensor::matrix({{1}})), DomainError);
  CHECK_THROWS_AS(r_squared(Tensor::matrix({{1}, {2}}), Tensor::matrix({{3}, {3}})), DomainError);
  CHECK(mae(Tensor::matrix({{1, 2}}), Tensor::matrix({{0, 0}})) == 1.5);
  CHECK(mse(Tensor::matrix({{1, 2}}), Tensor::matrix({{0, 0}})) == 2.5);
  const MeanStderr s = mean_and_stderr({1, 2, 3});
  CHECK(s.mean == 2.0);
  CHECK(s.stderr_ == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(mean_and_stderr({4}).stderr_ == 0.0);

  // a constant predictor scores at most zero, equality only at the test mean
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Tensor y({6, 1});
    for (double& v : y.values()) v = normal(rng);
    const Tensor pred({6, 1}, normal(rng));
    CHECK(r_squared(pred, y)[0] <= 1e-12);
  }
}

TEST_CASE("stratified folds") {
  std::vector<double> key10(10);
  std::iota(key10.begin(), key10.end(), 0.0);
  const auto f10 = stratified_kfold(key10, 10, 10, 1);
  CHECK(f10.size() == 10);
  for (const FoldSplit& f : f10) CHECK(f.test.size() == 1);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> key(100);
  for (double& v : key) v = normal(rng);
  const auto folds = stratified_kfold(key, 10, 10, 7);
  std::vector<int> seen(100, 0);
  for (const FoldSplit& f : folds) {
    CHECK(f.test.size() == 10);
    CHECK(f.val.size() == 9);
    CHECK(f.train.size() == 81);
    std::set<std::size_t> all(f.train.begin(), f.train.end());
    all.insert(f.val.begin(), f.val.end());
    all.insert(f.test.begin(), f.test.end());
    CHECK(all.size() == 100);
    for (std::size_t i : f.test) ++seen[i];
    // each test fold draws one sample from each decile
    std::set<std::size_t> deciles;
    std::vector<std::size_t> order(100);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key[a] < key[b]; });
    std::vector<std::size_t> rank(100);
    for (std::size_t r = 0; r < 100; ++r) rank[order[r]] = r;
    for (std::size_t i : f.test) deciles.insert(rank[i] / 10);
    CHECK(deciles.size() == 10);
  }
  for (int c : seen) CHECK(c == 1);
  const auto again = stratified_kfold(key, 10, 10, 7);
  for (std::size_t i = 0; i < 10; ++i) CHECK(again[i].test == folds[i].test);
  CHECK_THROWS_AS(stratified_kfold({1, 2}, 3, 2, 0), ConfigError);
  CHECK_THROWS_AS(stratified_kfold(key, 1, 2, 0), ConfigError);

  const FoldSplit r = random_split(50, 3);
  CHECK(r.train.size() == 30);
  CHECK(r.val.size() == 10);
  CHECK(r.test.size() == 10);
}

TEST_CASE("molecule generator") {
  const auto mols = generate_synthetic_molecules(30, 11);
  CHECK(mols.size() == 30);
  for (const Sample& s : mols) {
    REQUIRE(s.charges);
    const std::size_t n = s.positions.rows();
    CHECK(n >= 4);
    CHECK(n <= 8);
    CHECK(s.targets.size() == 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < 3; ++c) d2 += std::pow(s.positions(i, c) - s.positions(j, c), 2);
        CHECK(std::sqrt(d2) >= 0.8);
      }
    CHECK_NOTHROW(coulomb_matrix(PointCloud{s.positions, s.charges}));
    CHECK(molecule_targets(*s.charges, s.positions) == s.targets);
  }
  CHECK(generate_synthetic_molecules(30, 11) == mols);
  MoleculeGenOptions impossible;
  impossible.min_distance = 100.0;
  impossible.max_retries = 5;
  CHECK_THROWS_AS(generate_synthetic_molecules(1, 0, impossible), GenerationError);
}

TEST_CASE("point cloud generator") {
  const auto clouds = generate_point_clouds(5, 3);
  for (const Sample& s : clouds) {
    CHECK_FALSE(s.charges);
    CHECK(s.positions.rows() == 32);
    CHECK(s.targets[0] >= 0.1);
    CHECK(s.targets[0] <= 0.5);
    CHECK(s.targets[1] >= 0.6);
    CHECK(s.targets[1] <= 1.0);
  }
  CHECK(generate_point_clouds(5, 3) == clouds);
}

TEST_CASE("planted filter datasets") {
  theory::ShiftPair s;
  s.s1 = theory::Matrix::Zero(2, 2);
  s.s2 = theory::Matrix::Zero(2, 2);
  s.s1(0, 1) = 1.0;
  s.s2(1, 0) = 1.0;
  const theory::Matrix id = theory::Matrix::Identity(2, 2);
  const Dataset zero = generate_planted_filter_dataset(s, {0.5, 1.0}, 0.0, id, 0.01, 10, 1);
  CHECK(std::abs(zero.planted->analytic_gap) < 1e-12);
  const Dataset one = generate_planted_filter_dataset(s, {0.5, 1.0}, 1.0, id, 0.01, 10, 1);
  const double h0 = oracle::gram_residual(one.planted->oracle(),
                                          theory::build_basis(theory::FilterClass::H0, 2, s, id).matrices, id);
  CHECK(one.planted->analytic_gap == doctest::Approx(h0 * h0).epsilon(1e-10));
  CHECK(one.planted->analytic_gap == doctest::Approx(2.0).epsilon(1e-10));

  // noise-free data is recovered exactly by the tuple class
  const PlantedProblem p = random_planted_problem(5, 4, 0.0);
  const Dataset clean = generate_planted_filter_dataset(p.shifts, p.q, p.alpha, p.sigma, 0.0, 60, 4);
  const auto basis = theory::build_basis(theory::FilterClass::HGt, 2, p.shifts, p.sigma).matrices;
  std::vector<std::size_t> idx(60);
  std::iota(idx.begin(), idx.end(), 0);
  const auto coeffs = fit_linear_filter(basis, clean.filter_samples, idx);
  CHECK(linear_filter_mse(basis, coeffs, clean.filter_samples, idx) < 1e-18);
  CHECK(p.analytic_gap > 0.0);
}

TEST_CASE("dataset files") {
  Dataset d;
  d.samples = generate_synthetic_molecules(3, 1);
  CHECK(parse_dataset(serialize_dataset(d)).samples == d.samples);
  Dataset clouds;
  clouds.samples = generate_point_clouds(2, 1, CloudGenOptions{5, 10.0, 1});
  CHECK(parse_dataset(serialize_dataset(clouds)).samples == clouds.samples);
  Dataset mixed = d;
  mixed.samples.push_back(clouds.samples[0]);
  CHECK_THROWS_AS(parse_dataset(serialize_dataset(mixed)), SchemaError);

  const PlantedProblem p = random_planted_problem(4, 2);
  const Dataset planted = generate_planted_filter_dataset(p.shifts, p.q, p.alpha, p.sigma, p.noise_var, 5, 2);
  const Dataset pb = parse_dataset(serialize_dataset(planted));
  CHECK(pb.filter_samples == planted.filter_samples);
  CHECK(pb.planted->analytic_gap == planted.planted->analytic_gap);
  CHECK((pb.planted->oracle() - planted.planted->oracle()).norm() == 0.0);

  CHECK(parse_dataset("").warnings.size() == 1);
  CHECK(parse_dataset("\n\n").size() == 0);
  try {
    parse_dataset("{\"positions\": [[0,0,0]], \"targets\": [1]}\n{\"positions\": [[0,0,0]]}\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("targets") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dataset("{not json"), ParseError);
  CHECK_THROWS_AS(parse_dataset("{\"positions\": [[0,0]], \"targets\": [1]}"), SchemaError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.jsonl"), Error);
}

TEST_CASE("config overlay and validation") {
  const ExperimentConfig pc = ExperimentConfig::from_json({{"task", "pointcloud"}, {"radii", {{"c1", 2.0}}}});
  CHECK(pc.c2 == 4.0);
  CHECK(pc.hidden == 96);
  CHECK(pc.layers == 3);
  CHECK(pc.loss == LossKind::Mse);
  CHECK(pc.optimizer.kind == OptimizerKind::AdamW);
  const ExperimentConfig mol = ExperimentConfig::from_json({{"task", "molecule"}, {"hidden", 12}});
  CHECK(mol.hidden == 12);
  CHECK(mol.loss == LossKind::L1);
  CHECK(ExperimentConfig::from_json(mol.to_json()).to_json() == mol.to_json());
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"hidden", 3}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"task", "pointcloud"}, {"radii", {{"c1", 2.0}, {"c2", 3.0}}}}), ConfigError);
  CHECK_NOTHROW(ExperimentConfig::from_json(
      {{"task", "pointcloud"}, {"radii", {{"c1", 2.0}, {"c2", 3.0}, {"ratio_mode", false}}}}));
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"task", "molecule"}, {"hidden", "wide"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"task", "graphs"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"task", "molecule"}, {"loss", "huber"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"task", "molecule"}, {"folds", 1}}), ConfigError);
}

TEST_CASE("single-graph baseline matches the strong view") {
  const auto mols = generate_synthetic_molecules(20, 9);
  ExperimentConfig tuple = tiny_molecule_config();
  ExperimentConfig single = tuple;
  single.model = ModelKind::SingleGraph;
  for (const Sample& s : mols) {
    const GraphInput a = build_input(s, tuple);
    const GraphInput b = build_input(s, single);
    REQUIRE(a.tuple.num_views() == 2);
    REQUIRE(b.tuple.num_views() == 1);
    CHECK(a.tuple.views[0].edges == b.tuple.views[0].edges);
    CHECK(a.tuple.views[0].edge_feat == b.tuple.views[0].edge_feat);
    CHECK(validate_tuple(a.tuple).empty());
  }
  ExperimentConfig planted = ExperimentConfig::defaults_for(Task::PlantedFilter);
  CHECK_THROWS_AS(build_input(mols[0], planted), ConfigError);
  ExperimentConfig pc = ExperimentConfig::defaults_for(Task::PointCloud);
  const GraphInput cloud = build_input(generate_point_clouds(1, 2)[0], pc);
  CHECK(cloud.node_feat.cols() == 1);
  CHECK(cloud.tuple.views[0].edge_feat.cols() == pc.rbf_dim);
}

TEST_CASE("fit behaviour") {
  const auto mols = generate_synthetic_molecules(12, 3);
  ExperimentConfig c = tiny_molecule_config();
  const std::vector<GraphInput> inputs = build_inputs(mols, c);
  std::vector<std::size_t> train_idx(8);
  std::iota(train_idx.begin(), train_idx.end(), 0);
  const std::vector<std::size_t> val_idx{8, 9, 10, 11};
  const TargetScaler scaler = TargetScaler::fit(mols, train_idx);
  std::vector<Tensor> targets;
  for (const Sample& s : mols) targets.push_back(scaler.to_model(s.targets));
  CHECK(oracle::max_abs(scaler.to_raw(targets[0]), mols[0].targets) < 1e-12);

  FitOptions o = FitOptions::from_config(c);
  o.max_epochs = 0;
  Network untouched(network_spec_for(c, 3), 1);
  const auto before = untouched.snapshot();
  const FitResult none = fit(untouched, inputs, targets, train_idx, val_idx, o);
  CHECK(none.stop_reason == "untrained");
  CHECK(none.epochs_run == 0);
  CHECK(untouched.snapshot() == before);

  o.max_epochs = 60;
  o.early_stop_patience = 3;
  o.optimizer.lr = 0.05;
  Network a(network_spec_for(c, 3), 1);
  const FitResult ra = fit(a, inputs, targets, train_idx, val_idx, o);
  CHECK(ra.best_epoch >= 1);
  if (ra.stop_reason == "early_stop") CHECK(ra.epochs_run - ra.best_epoch == 3);
  CHECK(evaluate_loss(a, inputs, targets, val_idx, o.loss) == doctest::Approx(ra.best_metric).epsilon(1e-12));
  for (const EpochRecord& e : ra.curve) CHECK(e.metric >= ra.best_metric);

  Network b(network_spec_for(c, 3), 1);
  const FitResult rb = fit(b, inputs, targets, train_idx, val_idx, o);
  CHECK(b.snapshot() == a.snapshot());
  CHECK(rb.curve.size() == ra.curve.size());

  std::vector<Tensor> huge;
  for (const Sample& s : mols) huge.push_back(s.targets * 1e300);
  FitOptions d = FitOptions::from_config(c);
  d.loss = LossKind::Mse;
  d.max_epochs = 3;
  Network n(network_spec_for(c, 3), 1);
  CHECK_THROWS_AS(fit(n, inputs, huge, train_idx, {}, d), DivergenceError);
  CHECK_THROWS_AS(fit(n, inputs, targets, {}, {}, d), DomainError);
}

TEST_CASE("train and evaluate end to end") {
  Dataset data;
  data.samples = generate_synthetic_molecules(12, 4);
  const ExperimentConfig c = tiny_molecule_config();
  const TrainOutcome a = train(c, data);
  CHECK(a.report["runs"].size() == 3);
  CHECK(a.report["status"] == "trained");
  CHECK(a.model["kind"] == "network");
  const TrainOutcome b = train(c, data);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.csv == b.csv);
  const EvalOutcome e = evaluate_model(a.model, data);
  CHECK(e.report["samples"] == 12);
  CHECK(std::isfinite(e.report["mae"].get<double>()));

  ExperimentConfig z = c;
  z.max_epochs = 0;
  CHECK(train(z, data).report["status"] == "untrained");

  ExperimentConfig pf = ExperimentConfig::defaults_for(Task::PlantedFilter);
  pf.repeats = 3;
  const PlantedProblem p = random_planted_problem(5, 8);
  const Dataset planted = generate_planted_filter_dataset(p.shifts, p.q, p.alpha, p.sigma, p.noise_var, 200, 8);
  const TrainOutcome t = train(pf, planted);
  CHECK(t.report["summary"]["all_pass"].get<bool>());
  CHECK(t.model["kind"] == "linear-filter");
  CHECK_THROWS_AS(train(pf, data), SchemaError);
}

TEST_CASE("command functions") {
  const fs::path dir = scratch_dir("commands");
  std::ostringstream log;
  GenDataOptions g;
  g.task = "molecule";
  g.count = 9;
  g.seed = 2;
  g.out = (dir / "mol.jsonl").string();
  CHECK(cmd_gen_data(g, log) == 0);
  CHECK(load_dataset(g.out).samples.size() == 9);
  g.task = "bogus";
  CHECK_THROWS_AS(cmd_gen_data(g, log), ConfigError);

  nlohmann::json cfg = tiny_molecule_config().to_json();
  std::ofstream(dir / "cfg.json") << cfg.dump();
  TrainOptions t{(dir / "cfg.json").string(), (dir / "mol.jsonl").string(), (dir / "run").string()};
  CHECK(cmd_train(t, log) == 0);
  CHECK(fs::exists(dir / "run" / "report.json"));
  CHECK(fs::exists(dir / "run" / "metrics.csv"));
  CHECK(fs::exists(dir / "run" / "model.json"));
  CHECK(read_file(dir / "run" / "metrics.csv").rfind("run,train_size", 0) == 0);

  std::ostringstream eval_out;
  CHECK(cmd_eval(EvalOptions{(dir / "run" / "model.json").string(), (dir / "mol.jsonl").string()}, eval_out) == 0);
  CHECK(nlohmann::json::parse(eval_out.str())["samples"] == 9);

  GradcheckOptions gc;
  gc.layer = "gine";
  gc.instances = 2;
  gc.out = (dir / "grad.json").string();
  CHECK(cmd_gradcheck(gc, log) == 0);
  CHECK(fs::exists(dir / "grad.csv"));
  gc.tol = 1e-30;
  CHECK(cmd_gradcheck(gc, log) == 1);

  VerifyTheoryOptions v;
  v.suite.trials = 5;
  v.suite.mc_samples = 5000;
  v.out = (dir / "theory.json").string();
  CHECK(cmd_verify_theory(v, log) == 0);
  CHECK(fs::exists(dir / "theory.csv"));
  CHECK(csv_sibling("a/b.json") == "a/b.csv");
  CHECK(log.str().find("PASS") != std::string::npos);
  fs::remove_all(dir);
}

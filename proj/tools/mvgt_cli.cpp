// Command-line front end: data generation, training, evaluation and checks.

#include <iostream>

#include <CLI11.hpp>

#include "mvgt/commands.hpp"
#include "mvgt/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-view graph-tuple networks and filter-class checks"};
  app.require_subcommand(1);

  mvgt::GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic dataset as JSON lines");
  gen_cmd->add_option("--task", gen.task, "molecule, pointcloud or planted-filter")
      ->check(CLI::IsMember({"molecule", "pointcloud", "planted-filter"}))
      ->default_val(gen.task);
  gen_cmd->add_option("--count", gen.count, "Number of samples")->default_val(gen.count);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->default_val(gen.seed);
  gen_cmd->add_option("--out", gen.out, "Output file")->required();
  gen_cmd->add_option("--points", gen.points, "Points per cloud (pointcloud)")->default_val(gen.points);
  gen_cmd->add_option("--size", gen.size, "Shift operator size (planted-filter)")->default_val(gen.size);

  mvgt::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train with the configured protocol and write a report");
  train_cmd->add_option("--config", train.config, "Experiment config (JSON)")->required();
  train_cmd->add_option("--data", train.data, "Dataset (JSON lines)")->required();
  train_cmd->add_option("--out", train.out, "Output directory")->required();

  mvgt::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a saved model on a dataset");
  eval_cmd->add_option("--model", eval.model, "model.json written by train")->required();
  eval_cmd->add_option("--data", eval.data, "Dataset (JSON lines)")->required();

  mvgt::GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference layer gradients");
  grad_cmd->add_option("--layer", grad.layer, "gine, egcl, gine-gt, egnn-gt or all")
      ->check(CLI::IsMember({"all", "gine", "egcl", "gine-gt", "egnn-gt"}))
      ->default_val(grad.layer);
  grad_cmd->add_option("--seed", grad.seed, "Random seed")->default_val(grad.seed);
  grad_cmd->add_option("--tol", grad.tol, "Maximum relative error")->default_val(grad.tol);
  grad_cmd->add_option("--instances", grad.instances, "Random instances per layer")->default_val(grad.instances);
  grad_cmd->add_option("--out", grad.out, "Optional JSON report (CSV written alongside)");

  mvgt::VerifyTheoryOptions theory;
  auto* theory_cmd = app.add_subcommand("verify-theory", "Check the filter-class and oracle-risk results numerically");
  theory_cmd->add_option("--m", theory.suite.m, "Filter degree")->default_val(theory.suite.m);
  theory_cmd->add_option("--n", theory.suite.n, "Shift operator size")->default_val(theory.suite.n);
  theory_cmd->add_option("--trials", theory.suite.trials, "Random instances per check")->default_val(theory.suite.trials);
  theory_cmd->add_option("--seed", theory.suite.seed, "Random seed")->default_val(theory.suite.seed);
  theory_cmd->add_option("--mc-samples", theory.suite.mc_samples, "Monte Carlo samples per risk check")
      ->default_val(theory.suite.mc_samples);
  theory_cmd->add_option("--out", theory.out, "Optional JSON report (CSV written alongside)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return mvgt::cmd_gen_data(gen, std::cout);
    if (*train_cmd) return mvgt::cmd_train(train, std::cout);
    if (*eval_cmd) return mvgt::cmd_eval(eval, std::cout);
    if (*grad_cmd) return mvgt::cmd_gradcheck(grad, std::cout);
    if (*theory_cmd) return mvgt::cmd_verify_theory(theory, std::cout);
  } catch (const mvgt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

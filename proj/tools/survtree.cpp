#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "survtree/error.hpp"
#include "survtree/solver.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, survtree::cli::SolverFlags& f) {
  cmd->add_option("--depth", f.depth, "Maximum tree depth")->check(CLI::Range(0, 20));
  cmd->add_option("--nodes", f.nodes, "Maximum branching nodes (default 2^depth - 1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--time-limit", f.time_limit, "Solver time limit in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-depth2", f.no_depth2, "Disable the specialized depth-two solver");
  cmd->add_option("--min-leaf-size", f.min_leaf_size, "Minimum instances per leaf")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace survtree::cli;
  CLI::App app{"Optimal survival trees: generate, train, predict, evaluate, benchmark"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit an optimal survival tree on a CSV");
  train_cmd->add_option("--data", train.data, "Training CSV (time,event,features...)")->required();
  train_cmd->add_option("--out-dir", train.out_dir, "Output directory");
  train_cmd->add_option("--schema", train.schema, "Column schema JSON overriding inference");
  add_solver_flags(train_cmd, train.solver);
  train_cmd->add_flag("--tune", train.tune, "Select depth and node budget by cross-validation");
  train_cmd->add_option("--folds", train.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  train_cmd->add_option("--seed", train.seed, "Seed for fold assignment");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Per-row risk coefficients from a trained model");
  predict_cmd->add_option("--model-dir", predict.model_dir, "Directory written by train");
  predict_cmd->add_option("--data", predict.data, "Input CSV")->required();
  predict_cmd->add_option("--out-dir", predict.out_dir, "Output directory");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Harrell's C and integrated Brier score");
  evaluate_cmd->add_option("--model-dir", evaluate.model_dir, "Directory written by train");
  evaluate_cmd->add_option("--data", evaluate.data, "Test CSV")->required();
  evaluate_cmd->add_option("--out-dir", evaluate.out_dir, "Output directory");
  evaluate_cmd->add_option("--predictor", evaluate.predictor, "tree or km (training Kaplan-Meier)")
      ->check(CLI::IsMember({"tree", "km"}));

  GenerateArgs generate;
  auto* generate_cmd = app.add_subcommand("generate", "Synthetic censored data from a random tree");
  generate_cmd->add_option("--n", generate.n, "Training instances")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--c", generate.c, "Censoring fraction in [0, 1)");
  generate_cmd->add_option("--seed", generate.seed, "Random seed");
  generate_cmd->add_option("--test-n", generate.test_n, "Test instances");
  generate_cmd->add_flag("--double-features", generate.doubled, "Use the doubled feature schema");
  generate_cmd->add_option("--out-dir", generate.out_dir, "Output directory");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Runtime and loss over a depth sweep");
  bench_cmd->add_option("--data", bench.data, "Training CSV; generated in-run when omitted");
  bench_cmd->add_option("--n", bench.n, "Generated instances")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--c", bench.c, "Generated censoring fraction");
  bench_cmd->add_option("--seed", bench.seed, "Generation seed");
  bench_cmd->add_option("--max-depth", bench.max_depth, "Largest depth in the sweep")
      ->check(CLI::Range(0, 20));
  bench_cmd->add_option("--time-limit", bench.time_limit, "Per-cell time limit in seconds")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--min-leaf-size", bench.min_leaf_size, "Minimum instances per leaf")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("!--no-compare-depth2", bench.compare_depth2,
                      "Skip the runs with the depth-two solver disabled");
  bench_cmd->add_option("--schema", bench.schema, "Column schema JSON overriding inference");
  bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*predict_cmd) return run_predict(predict);
    if (*evaluate_cmd) return run_evaluate(evaluate);
    if (*generate_cmd) return run_generate(generate);
    if (*bench_cmd) return run_benchmark(bench);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const survtree::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

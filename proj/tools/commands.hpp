#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace survtree::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kTimeout = 4 };

// Bad flag values that CLI11 cannot catch by itself.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  int depth = 3;
  std::optional<int> nodes;
  std::optional<double> time_limit;
  bool no_depth2 = false;
  std::size_t min_leaf_size = 1;
};

struct TrainArgs {
  std::string data;
  std::string out_dir = ".";
  std::string schema;
  SolverFlags solver;
  bool tune = false;
  int folds = 10;
  std::uint64_t seed = 0;
};

struct PredictArgs {
  std::string model_dir = ".";
  std::string data;
  std::string out_dir = ".";
};

struct EvaluateArgs {
  std::string model_dir = ".";
  std::string data;
  std::string out_dir = ".";
  std::string predictor = "tree";
};

struct GenerateArgs {
  std::size_t n = 1000;
  double c = 0.0;
  std::uint64_t seed = 0;
  std::size_t test_n = 50000;
  bool doubled = false;
  std::string out_dir = ".";
};

struct BenchmarkArgs {
  std::string data;
  std::size_t n = 1000;
  double c = 0.5;
  std::uint64_t seed = 0;
  int max_depth = 4;
  std::optional<double> time_limit;
  bool compare_depth2 = true;
  std::size_t min_leaf_size = 1;
  std::string schema;
  std::string out_dir = ".";
};

int run_train(const TrainArgs& args);
int run_predict(const PredictArgs& args);
int run_evaluate(const EvaluateArgs& args);
int run_generate(const GenerateArgs& args);
int run_benchmark(const BenchmarkArgs& args);

}  // namespace survtree::cli

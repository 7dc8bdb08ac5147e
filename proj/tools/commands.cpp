#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "survtree/baseline.hpp"
#include "survtree/io.hpp"
#include "survtree/loss.hpp"
#include "survtree/metrics.hpp"
#include "survtree/preprocess.hpp"
#include "survtree/solver.hpp"
#include "survtree/synthgen.hpp"
#include "survtree/tree.hpp"
#include "survtree/tune.hpp"

namespace survtree::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Collects what goes into manifest.json. Timings are kept under their own
// key since they are the only nondeterministic content.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void config(const std::string& key, json value) { config_[key] = std::move(value); }
  void seed(std::uint64_t s) { seed_ = s; }
  void input(const fs::path& path) { inputs_[path.string()] = digest_hex(read_file(path)); }
  void output(const fs::path& path) { outputs_.push_back(path.string()); }

  template <typename F>
  auto timed(const std::string& phase, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      Manifest* m;
      std::string phase;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        m->timings_[phase] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } record{this, phase, start};
    return body();
  }

  void write(const fs::path& out_dir) {
    const fs::path path = out_dir / "manifest.json";
    outputs_.push_back(path.string());
    json doc{{"command", command_}, {"config", config_},       {"inputs", inputs_},
             {"outputs", outputs_}, {"timings", timings_}};
    if (seed_) doc["seed"] = *seed_;
    write_file(path, doc.dump(2) + "\n");
  }

 private:
  std::string command_;
  json config_ = json::object();
  json inputs_ = json::object();
  json outputs_ = json::array();
  json timings_ = json::object();
  std::optional<std::uint64_t> seed_;
};

void write_json(const fs::path& path, const json& doc, Manifest& manifest) {
  write_file(path, doc.dump(2) + "\n");
  manifest.output(path);
}

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

struct PreparedData {
  BinarizationMap map;
  Dataset raw;  // no hazards
};

PreparedData prepare(const fs::path& csv_path, const std::string& schema_path, Manifest& manifest) {
  manifest.input(csv_path);
  const auto table = to_survival_table(read_csv(csv_path));
  if (table.times.empty()) throw DataError(csv_path.string() + ": no data rows");
  auto schema = infer_schema(table.features);
  if (!schema_path.empty()) {
    manifest.input(schema_path);
    schema = apply_schema_overrides(std::move(schema), json::parse(read_file(schema_path)));
  }
  auto map = fit_binarizer(table.features, schema);
  auto raw = build_dataset(map, table);
  return {std::move(map), std::move(raw)};
}

SolverConfig solver_config(const SolverFlags& f) {
  SolverConfig c;
  c.max_depth = f.depth;
  c.max_nodes = f.nodes.value_or(f.depth < 31 ? (1 << f.depth) - 1 : 1 << 30);
  c.use_depth2 = !f.no_depth2;
  c.min_leaf_size = f.min_leaf_size;
  c.time_limit = f.time_limit;
  return c;
}

std::optional<double> safe_normalized_loss(double loss, double root) {
  if (!(root > 0.0)) return std::nullopt;
  return normalized_loss(loss, root);
}

struct Model {
  SurvivalTree tree;
  BinarizationMap map;
  BaselineHazard baseline;
};

Model load_model(const fs::path& dir, Manifest& manifest) {
  const auto tree_path = dir / "tree.json";
  const auto map_path = dir / "binarizer.json";
  const auto base_path = dir / "baseline.json";
  for (const auto& p : {tree_path, map_path, base_path}) manifest.input(p);
  return {tree_from_json(json::parse(read_file(tree_path))),
          binarizer_from_json(json::parse(read_file(map_path))),
          baseline_from_json(json::parse(read_file(base_path)))};
}

}  // namespace

int run_train(const TrainArgs& args) {
  const fs::path out_dir = args.out_dir;
  Manifest manifest("train");
  manifest.seed(args.seed);
  const SolverConfig config = solver_config(args.solver);
  manifest.config("data", args.data);
  manifest.config("depth", config.max_depth);
  manifest.config("nodes", config.max_nodes);
  manifest.config("tune", args.tune);
  manifest.config("folds", args.folds);
  manifest.config("depth2", config.use_depth2);
  manifest.config("min_leaf_size", config.min_leaf_size);
  manifest.config("time_limit", number_or_null(config.time_limit));
  manifest.config("schema", args.schema);

  auto prepared = manifest.timed("preprocess", [&] { return prepare(args.data, args.schema, manifest); });
  const BaselineHazard baseline = fit_baseline(prepared.raw);
  const Dataset data = prepared.raw.with_baseline(baseline);

  int depth = config.max_depth;
  int nodes = config.max_nodes;
  json summary;
  if (args.tune) {
    TuneGrid grid;
    for (int d = 0; d <= config.max_depth; ++d) grid.depths.push_back(d);
    if (args.solver.nodes) {
      for (int n = 0; n <= *args.solver.nodes; ++n) grid.node_budgets.push_back(n);
    }
    grid.folds = args.folds;
    grid.seed = args.seed;
    const auto tuned = manifest.timed("tune", [&] { return cross_validate(prepared.raw, grid, config); });
    const auto score_path = out_dir / "score_table.csv";
    write_csv(score_path, score_table_csv(tuned));
    manifest.output(score_path);
    depth = tuned.best_depth;
    nodes = tuned.best_nodes;
    summary["selected_depth"] = depth;
    summary["selected_nodes"] = nodes;
    summary["zero_hazard_heldout_instances"] = tuned.zero_hazard_instances;
    std::cout << "selected depth " << depth << ", nodes " << nodes << '\n';
  }

  SolveResult result;
  int exit_code = kOk;
  try {
    result = manifest.timed("solve", [&] { return refit(data, depth, nodes, config); });
  } catch (const SolverTimeout& timeout) {
    result = timeout.incumbent();
    exit_code = kTimeout;
    std::cerr << "time limit reached; saving the best tree found so far (not proven optimal)\n";
  }

  const double root_loss = leaf_loss(tuple_of(data));
  const auto normalized = safe_normalized_loss(result.loss, root_loss);
  summary["depth"] = depth;
  summary["nodes"] = nodes;
  summary["train_loss"] = result.loss;
  summary["root_leaf_loss"] = root_loss;
  summary["normalized_loss"] = number_or_null(normalized);
  summary["optimal"] = result.optimal;
  summary["features"] = prepared.map.feature_count();
  summary["instances"] = data.size();

  write_json(out_dir / "tree.json", to_json(result.tree), manifest);
  write_json(out_dir / "binarizer.json", to_json(prepared.map), manifest);
  write_json(out_dir / "baseline.json", to_json(baseline), manifest);
  write_json(out_dir / "summary.json", summary, manifest);
  manifest.write(out_dir);

  std::cout << "training loss " << format_double(result.loss) << '\n';
  std::cout << "normalized loss " << (normalized ? format_double(*normalized) : "undefined") << '\n';
  return exit_code;
}

int run_predict(const PredictArgs& args) {
  const fs::path out_dir = args.out_dir;
  Manifest manifest("predict");
  manifest.config("model_dir", args.model_dir);
  manifest.config("data", args.data);
  const Model model = load_model(args.model_dir, manifest);
  manifest.input(args.data);
  const auto features = apply_binarizer(model.map, to_feature_table(read_csv(args.data)));

  CsvTable out;
  out.header = {"row", "theta"};
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.rows.push_back({std::to_string(i + 1), format_double(predict_theta(model.tree, features[i]))});
  }
  const auto path = out_dir / "predictions.csv";
  write_csv(path, out);
  manifest.output(path);
  manifest.write(out_dir);
  std::cout << "wrote " << features.size() << " predictions to " << path.string() << '\n';
  return kOk;
}

int run_evaluate(const EvaluateArgs& args) {
  const fs::path out_dir = args.out_dir;
  Manifest manifest("evaluate");
  manifest.config("model_dir", args.model_dir);
  manifest.config("data", args.data);
  manifest.config("predictor", args.predictor);
  const Model model = load_model(args.model_dir, manifest);
  manifest.input(args.data);
  const auto table = to_survival_table(read_csv(args.data));
  const auto features = apply_binarizer(model.map, table.features);

  json report{{"instances", table.times.size()}, {"predictor", args.predictor}};
  json reasons = json::object();

  // Risk per instance and one survival curve per distinct risk.
  const bool km = args.predictor == "km";
  std::vector<double> thetas(features.size(), 1.0);
  if (!km) {
    for (std::size_t i = 0; i < features.size(); ++i) thetas[i] = predict_theta(model.tree, features[i]);
  }
  std::map<double, std::size_t> curve_id;
  std::vector<SurvivalCurve> curves;
  std::vector<std::size_t> curve_of(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    auto [it, fresh] = curve_id.emplace(thetas[i], curves.size());
    if (fresh) {
      curves.push_back(km ? kaplan_meier_curve(model.baseline)
                          : proportional_hazard_curve(model.baseline, thetas[i]));
    }
    curve_of[i] = it->second;
  }

  const auto counts = concordance_counts(table.times, table.events, thetas);
  report["comparable_pairs"] = counts.comparable();
  report["concordant_pairs"] = counts.concordant;
  report["discordant_pairs"] = counts.discordant;
  report["tied_risk_pairs"] = counts.tied_risk;
  try {
    report["harrell_c"] = harrell_c(table.times, table.events, thetas);
  } catch (const MetricError& e) {
    report["harrell_c"] = nullptr;
    reasons["harrell_c"] = e.what();
  }

  report["ib"] = nullptr;
  report["ib0"] = nullptr;
  report["normalized_ib"] = nullptr;
  report["window"] = nullptr;
  try {
    const auto window = eval_window(table.times);
    report["window"] = {{"lower", window.lower}, {"upper", window.upper}};
    const auto g = censoring_km(table.times, table.events);
    const double ib = integrated_brier(table.times, table.events, curves, curve_of, window, g);
    report["ib"] = ib;
    const std::vector<SurvivalCurve> baseline_curve{kaplan_meier_curve(model.baseline)};
    const std::vector<std::size_t> all_zero(table.times.size(), 0);
    const double ib0 = integrated_brier(table.times, table.events, baseline_curve, all_zero, window, g);
    report["ib0"] = ib0;
    report["normalized_ib"] = normalized_ib(ib, ib0);
  } catch (const MetricError& e) {
    reasons["integrated_brier"] = e.what();
  }
  report["undefined"] = reasons;

  write_json(out_dir / "metrics.json", report, manifest);
  manifest.write(out_dir);

  auto show = [&](const char* key) {
    const auto& v = report[key];
    std::cout << key << ' ' << (v.is_null() ? std::string("undefined") : format_double(v.get<double>()))
              << '\n';
  };
  show("harrell_c");
  show("ib");
  show("ib0");
  show("normalized_ib");
  std::cout << "comparable_pairs " << counts.comparable() << '\n';
  return kOk;
}

int run_generate(const GenerateArgs& args) {
  if (!(args.c >= 0.0 && args.c < 1.0)) throw UsageError("--c must lie in [0, 1)");
  if (args.n < 1) throw UsageError("--n must be at least 1");
  const fs::path out_dir = args.out_dir;
  Manifest manifest("generate");
  manifest.seed(args.seed);
  manifest.config("n", args.n);
  manifest.config("c", args.c);
  manifest.config("test_n", args.test_n);
  manifest.config("double_features", args.doubled);

  const GenConfig config{args.n, args.c, args.seed, args.doubled};
  const auto tree = ground_truth_for(config);
  const auto train = manifest.timed("train", [&] { return generate_sample(tree, args.n, args.c, args.seed, 0); });
  const auto train_path = out_dir / "train.csv";
  write_csv(train_path, to_csv(train));
  manifest.output(train_path);

  std::size_t test_censored = 0;
  if (args.test_n > 0) {
    const auto test = manifest.timed("test", [&] { return generate_sample(tree, args.test_n, args.c, args.seed, 1); });
    const auto test_path = out_dir / "test.csv";
    write_csv(test_path, to_csv(test));
    manifest.output(test_path);
    test_censored = test.outcome.censored;
  }

  json truth{{"tree", to_json(tree)},
             {"config", {{"n", args.n}, {"c", args.c}, {"seed", args.seed}, {"test_n", args.test_n},
                         {"double_features", args.doubled}}},
             {"train_k", train.outcome.k},
             {"train_censored", train.outcome.censored},
             {"test_censored", test_censored}};
  write_json(out_dir / "ground_truth.json", truth, manifest);
  manifest.write(out_dir);
  std::cout << "generated " << args.n << " training rows (" << train.outcome.censored
            << " censored) and " << args.test_n << " test rows\n";
  return kOk;
}

int run_benchmark(const BenchmarkArgs& args) {
  if (!(args.c >= 0.0 && args.c < 1.0)) throw UsageError("--c must lie in [0, 1)");
  const fs::path out_dir = args.out_dir;
  Manifest manifest("benchmark");
  manifest.seed(args.seed);
  manifest.config("data", args.data);
  manifest.config("max_depth", args.max_depth);
  manifest.config("time_limit", number_or_null(args.time_limit));
  manifest.config("compare_depth2", args.compare_depth2);
  manifest.config("min_leaf_size", args.min_leaf_size);

  PreparedData prepared;
  if (args.data.empty()) {
    manifest.config("n", args.n);
    manifest.config("c", args.c);
    const GenConfig gen{args.n, args.c, args.seed, false};
    const auto sample = generate_sample(ground_truth_for(gen), args.n, args.c, args.seed, 0);
    const auto csv_path = out_dir / "benchmark_data.csv";
    write_csv(csv_path, to_csv(sample));
    manifest.output(csv_path);
    prepared = prepare(csv_path, args.schema, manifest);
  } else {
    prepared = prepare(args.data, args.schema, manifest);
  }
  const BaselineHazard baseline = fit_baseline(prepared.raw);
  const Dataset data = prepared.raw.with_baseline(baseline);
  const double root_loss = leaf_loss(tuple_of(data));

  CsvTable out;
  out.header = {"depth", "nodes", "depth2", "status", "runtime_s", "train_loss", "normalized_loss"};
  for (int d = 0; d <= args.max_depth; ++d) {
    for (int pass = 0; pass < (args.compare_depth2 ? 2 : 1); ++pass) {
      SolverConfig config;
      config.max_depth = d;
      config.max_nodes = (1 << d) - 1;
      config.use_depth2 = pass == 0;
      config.min_leaf_size = args.min_leaf_size;
      config.time_limit = args.time_limit;
      const auto start = std::chrono::steady_clock::now();
      std::string status = "optimal";
      std::string loss = "";
      std::string normalized = "";
      try {
        const auto r = solve(data, config);
        loss = format_double(r.loss);
        if (const auto nl = safe_normalized_loss(r.loss, root_loss)) normalized = format_double(*nl);
      } catch (const SolverTimeout& t) {
        status = "timeout";
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.rows.push_back({std::to_string(d), std::to_string(config.max_nodes),
                          config.use_depth2 ? "1" : "0", status, format_double(secs), loss, normalized});
      std::cout << "depth " << d << " depth2 " << (config.use_depth2 ? "on " : "off") << ' ' << status
                << ' ' << secs << "s loss " << loss << '\n';
    }
  }
  const auto path = out_dir / "benchmark.csv";
  write_csv(path, out);
  manifest.output(path);
  manifest.write(out_dir);
  return kOk;
}

}  // namespace survtree::cli

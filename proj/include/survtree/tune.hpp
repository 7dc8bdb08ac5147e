#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survtree/baseline.hpp"
#include "survtree/dataset.hpp"
#include "survtree/io.hpp"
#include "survtree/solver.hpp"

namespace survtree {

struct TuneGrid {
  std::vector<int> depths;
  // Explicit node budgets; empty means every budget 0 .. 2^d - 1 per depth.
  std::vector<int> node_budgets;
  int folds = 10;
  std::uint64_t seed = 0;

  // (depth, nodes) cells in solve order: depth ascending, then nodes.
  std::vector<Budget> cells() const;
};

enum class TuneCriterion { heldout_loss, harrell_c };

struct ScoreRow {
  int fold = 0;
  int depth = 0;
  int nodes = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // held-out loss per instance
  std::optional<double> val_cindex;
};

struct CellScore {
  Budget budget;
  double mean_val_loss = 0.0;
  std::optional<double> mean_val_cindex;
};

struct TuneResult {
  int best_depth = 0;
  int best_nodes = 0;
  std::vector<ScoreRow> score_table;
  std::vector<CellScore> cells;
  // Held-out instances whose time precedes the first training event.
  std::size_t zero_hazard_instances = 0;
};

// Stratified by event: events and censored instances are shuffled
// separately and dealt round-robin. Throws DataError if a fold gets no event.
std::vector<int> assign_folds(const Dataset& data, int folds, std::uint64_t seed);

// Held-out likelihood loss of a fitted tree: every instance at its leaf's
// theta against `baseline`. Instances with zero baseline hazard add 0.
double heldout_loss(const SurvivalTree& tree, const BaselineHazard& baseline, const Dataset& data,
                    std::size_t* zero_hazard = nullptr);

// k-fold cross-validation over the grid. With share_cache, one solver per
// fold serves every cell.
TuneResult cross_validate(const Dataset& data, const TuneGrid& grid, const SolverConfig& config,
                          TuneCriterion criterion = TuneCriterion::heldout_loss,
                          bool share_cache = true);

// Solve on the full data at the chosen budgets. `data` must carry hazards.
SolveResult refit(const Dataset& data, int depth, int nodes, const SolverConfig& config);

// fold,depth,nodes,train_loss,val_loss
CsvTable score_table_csv(const TuneResult& result);

}  // namespace survtree

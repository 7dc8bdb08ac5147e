#include "survtree/tune.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "survtree/error.hpp"
#include "survtree/loss.hpp"
#include "survtree/metrics.hpp"

namespace survtree {

std::vector<Budget> TuneGrid::cells() const {
  if (depths.empty()) throw DomainError("tuning grid has no depths");
  std::vector<Budget> out;
  auto depths_sorted = depths;
  std::sort(depths_sorted.begin(), depths_sorted.end());
  depths_sorted.erase(std::unique(depths_sorted.begin(), depths_sorted.end()), depths_sorted.end());
  for (int d : depths_sorted) {
    if (d < 0 || d > 20) throw DomainError("tuning depth out of range");
    std::vector<int> budgets = node_budgets;
    if (budgets.empty()) {
      budgets.resize(static_cast<std::size_t>(1 << d));
      std::iota(budgets.begin(), budgets.end(), 0);
    }
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
    for (int n : budgets) {
      if (n < 0) throw DomainError("negative node budget in tuning grid");
      // Budgets beyond what the depth allows collapse onto the same cell.
      const Budget b = normalize_budget(d, n);
      if (std::find_if(out.begin(), out.end(), [&](const Budget& o) {
            return o.depth == b.depth && o.nodes == b.nodes;
          }) == out.end()) {
        out.push_back(b);
      }
    }
  }
  return out;
}

std::vector<int> assign_folds(const Dataset& data, int folds, std::uint64_t seed) {
  if (folds < 2 || static_cast<std::size_t>(folds) > data.size()) {
    throw DomainError("fold count must be between 2 and the number of instances");
  }
  std::vector<std::uint32_t> events;
  std::vector<std::uint32_t> censored;
  for (std::uint32_t i = 0; i < data.size(); ++i) (data[i].event ? events : censored).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(censored.begin(), censored.end(), rng);

  std::vector<int> fold(data.size(), 0);
  std::size_t next = 0;
  for (auto i : events) fold[i] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
  for (auto i : censored) fold[i] = static_cast<int>(next++ % static_cast<std::size_t>(folds));
  if (events.size() < static_cast<std::size_t>(folds)) {
    throw DataError("only " + std::to_string(events.size()) + " events for " +
                    std::to_string(folds) + " folds: fold " + std::to_string(events.size()) +
                    " would contain no event; lower --folds");
  }
  return fold;
}

double heldout_loss(const SurvivalTree& tree, const BaselineHazard& baseline, const Dataset& data,
                    std::size_t* zero_hazard) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double h = baseline.cumulative_hazard(data[i].time);
    if (!(h > 0.0)) {
      if (zero_hazard != nullptr) ++*zero_hazard;
      continue;
    }
    const double theta = predict_theta(tree, data[i].features);
    sum += h * theta;
    if (data[i].event) sum += -std::log(h * theta) - 1.0;
  }
  return sum;
}

TuneResult cross_validate(const Dataset& data, const TuneGrid& grid, const SolverConfig& config,
                          TuneCriterion criterion, bool share_cache) {
  const auto cells = grid.cells();
  const auto fold_of = assign_folds(data, grid.folds, grid.seed);

  TuneResult result;
  std::vector<double> loss_sum(cells.size(), 0.0);
  std::vector<double> cindex_sum(cells.size(), 0.0);
  for (int f = 0; f < grid.folds; ++f) {
    std::vector<std::uint32_t> train_idx;
    std::vector<std::uint32_t> val_idx;
    for (std::uint32_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? val_idx : train_idx).push_back(i);
    const Dataset raw_train = data.subset(train_idx);
    const BaselineHazard baseline = fit_baseline(raw_train);
    const Dataset train = raw_train.with_baseline(baseline);
    const Dataset val = data.subset(val_idx);
    const auto val_times = val.times();
    const auto val_events = val.events();

    std::optional<Solver> shared;
    if (share_cache) shared.emplace(train, config);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::optional<Solver> own;
      Solver& solver = share_cache ? *shared : own.emplace(train, config);
      const SolveResult fit = solver.solve(cells[c].depth, cells[c].nodes);

      ScoreRow row{f, cells[c].depth, cells[c].nodes, fit.loss, 0.0, std::nullopt};
      std::size_t zero = 0;
      row.val_loss = heldout_loss(fit.tree, baseline, val, &zero) / static_cast<double>(val.size());
      if (c == 0) result.zero_hazard_instances += zero;
      if (criterion == TuneCriterion::harrell_c) {
        std::vector<double> thetas;
        thetas.reserve(val.size());
        for (const auto& inst : val.instances()) thetas.push_back(predict_theta(fit.tree, inst.features));
        const auto counts = concordance_counts(val_times, val_events, thetas);
        row.val_cindex = counts.comparable() == 0 ? 0.5 : harrell_c(val_times, val_events, thetas);
        cindex_sum[c] += *row.val_cindex;
      }
      loss_sum[c] += row.val_loss;
      result.score_table.push_back(row);
    }
  }

  const double k = static_cast<double>(grid.folds);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellScore s{cells[c], loss_sum[c] / k, std::nullopt};
    if (criterion == TuneCriterion::harrell_c) s.mean_val_cindex = cindex_sum[c] / k;
    result.cells.push_back(s);
  }

  // Ties go to fewer nodes, then smaller depth.
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cells[a].nodes != cells[b].nodes) return cells[a].nodes < cells[b].nodes;
    return cells[a].depth < cells[b].depth;
  });
  std::size_t best = order.front();
  for (auto c : order) {
    const bool better = criterion == TuneCriterion::harrell_c
                            ? *result.cells[c].mean_val_cindex > *result.cells[best].mean_val_cindex
                            : result.cells[c].mean_val_loss < result.cells[best].mean_val_loss;
    if (better) best = c;
  }
  result.best_depth = cells[best].depth;
  result.best_nodes = cells[best].nodes;
  return result;
}

SolveResult refit(const Dataset& data, int depth, int nodes, const SolverConfig& config) {
  SolverConfig c = config;
  c.max_depth = depth;
  c.max_nodes = nodes;
  return solve(data, c);
}

CsvTable score_table_csv(const TuneResult& result) {
  CsvTable csv;
  csv.header = {"fold", "depth", "nodes", "train_loss", "val_loss"};
  for (const auto& r : result.score_table) {
    csv.rows.push_back({std::to_string(r.fold), std::to_string(r.depth), std::to_string(r.nodes),
                        format_double(r.train_loss), format_double(r.val_loss)});
  }
  return csv;
}

}  // namespace survtree

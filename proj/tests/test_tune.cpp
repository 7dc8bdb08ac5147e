#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "survtree/baseline.hpp"
#include "survtree/error.hpp"
#include "survtree/loss.hpp"
#include "survtree/tune.hpp"

using namespace survtree;

TEST_CASE("folds are stratified and reproducible") {
  std::mt19937_64 rng(51);
  const auto data = oracle::random_dataset(rng, 103, 3);
  const auto folds = assign_folds(data, 5, 9);
  CHECK(folds == assign_folds(data, 5, 9));
  std::vector<int> size(5), events(5);
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++size[folds[i]];
    events[folds[i]] += data[i].event;
  }
  for (int f = 0; f < 5; ++f) {
    CHECK(size[f] >= 20);
    CHECK(size[f] <= 21);
    CHECK(events[f] >= 1);
  }
  Dataset few(1);
  for (int i = 0; i < 10; ++i) few.add({1.0 + i, i < 2, FeatureVector{i % 2}});
  CHECK_THROWS_AS(assign_folds(few, 5, 1), DataError);
  CHECK_THROWS_AS(assign_folds(few, 11, 1), DomainError);
}

TEST_CASE("grid cells") {
  TuneGrid grid;
  grid.depths = {0, 1, 2};
  CHECK(grid.cells().size() == 4);  // (0,0) (1,1) (2,2) (2,3)
  grid.node_budgets = {0, 1};
  CHECK(grid.cells().size() == 2);
}

TEST_CASE("cross validation is deterministic and cache sharing is transparent") {
  std::mt19937_64 rng(52);
  const auto data = oracle::random_dataset(rng, 150, 5);
  TuneGrid grid;
  grid.depths = {0, 1, 2};
  grid.folds = 4;
  grid.seed = 3;
  const auto shared = cross_validate(data, grid, SolverConfig{});
  const auto fresh = cross_validate(data, grid, SolverConfig{}, TuneCriterion::heldout_loss, false);
  REQUIRE(shared.score_table.size() == fresh.score_table.size());
  for (std::size_t i = 0; i < shared.score_table.size(); ++i) {
    CHECK(shared.score_table[i].val_loss == doctest::Approx(fresh.score_table[i].val_loss));
  }
  CHECK(shared.best_depth == fresh.best_depth);
  CHECK(shared.best_nodes == fresh.best_nodes);
  CHECK(shared.score_table.size() == 4 * 4);
  // selected cell has the minimal mean score
  double best = INFINITY;
  for (const auto& c : shared.cells) best = std::min(best, c.mean_val_loss);
  for (const auto& c : shared.cells) {
    if (c.budget.depth == shared.best_depth && c.budget.nodes == shared.best_nodes) {
      CHECK(c.mean_val_loss == best);
    }
  }
  const auto csv = score_table_csv(shared);
  CHECK(csv.header == std::vector<std::string>{"fold", "depth", "nodes", "train_loss", "val_loss"});
}

TEST_CASE("held-out loss of a leaf") {
  std::mt19937_64 rng(53);
  const auto data = oracle::random_dataset(rng, 80, 2);
  const auto b = fit_baseline(data);
  std::size_t zero = 0;
  const double loss = heldout_loss(SurvivalTree::leaf(1.0), b, data, &zero);
  CHECK(zero == 0);
  // with a self-fit baseline and theta 1 the held-out loss is the leaf loss
  const auto with = data.with_baseline(b);
  CHECK(loss == doctest::Approx(leaf_loss_direct(with, 1.0)));
}

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "survtree/baseline.hpp"
#include "survtree/depth2.hpp"
#include "survtree/loss.hpp"
#include "survtree/solver.hpp"

using namespace survtree;

namespace {

Dataset with_hazard(Dataset d) { return d.with_baseline(fit_baseline(d)); }

CostTuple filter_sum(const Dataset& d, std::size_t i, bool vi, std::size_t j, bool vj,
                     std::uint32_t& count) {
  CostTuple t;
  count = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k].features[i] == vi && d[k].features[j] == vj) {
      t += instance_tuple(d, k);
      ++count;
    }
  }
  return t;
}

void check_close(const CostTuple& a, const CostTuple& b) {
  CHECK(a.es == doctest::Approx(b.es));
  CHECK(a.hs == doctest::Approx(b.hs).epsilon(1e-9));
  CHECK(a.nlhs == doctest::Approx(b.nlhs).epsilon(1e-9));
}

}  // namespace

TEST_CASE("quadrant sums match filtering, with and without flipping") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto data = with_hazard(oracle::random_dataset(rng, 80, 6));
    for (bool flip : {false, true}) {
      const auto sums = precompute(data, flip);
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
          if (i == j) continue;
          const auto q = complement_sums(sums, i, j);
          std::uint32_t c = 0;
          check_close(q.both, filter_sum(data, i, true, j, true, c));
          CHECK(q.counts[0] == c);
          check_close(q.only_i, filter_sum(data, i, true, j, false, c));
          CHECK(q.counts[1] == c);
          check_close(q.only_j, filter_sum(data, i, false, j, true, c));
          CHECK(q.counts[2] == c);
          check_close(q.neither, filter_sum(data, i, false, j, false, c));
          CHECK(q.counts[3] == c);
        }
      }
    }
  }
}

TEST_CASE("depth-two solver matches brute force for each budget") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 40; ++rep) {
    const auto data = with_hazard(oracle::random_dataset(rng, 5 + rep, 1 + rep % 6));
    for (int nodes = 1; nodes <= 3; ++nodes) {
      const auto r = best_depth2(data, nodes);
      const double expected = oracle::brute_force(data, 2, nodes);
      CHECK(r.loss == doctest::Approx(expected).epsilon(1e-9));
      CHECK(tree_loss(r.tree, data) == doctest::Approx(r.loss).epsilon(1e-9));
      CHECK(r.tree.branch_count() <= nodes);
      CHECK(r.tree.depth() <= 2);
    }
  }
}

TEST_CASE("depth-two solver respects the minimum leaf size") {
  std::mt19937_64 rng(23);
  const auto data = with_hazard(oracle::random_dataset(rng, 40, 5));
  const auto sums = precompute(data);
  const auto choices = solve_depth2(sums, 10);
  for (const auto& c : choices) {
    const auto tree = build_depth2_tree(c, data, [&] {
      std::vector<std::uint32_t> all(data.size());
      for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
      return all;
    }());
    std::vector<int> sizes(tree.nodes().size());
    for (std::size_t i = 0; i < data.size(); ++i) ++sizes[tree.leaf_index(data[i].features)];
    for (std::size_t n = 0; n < sizes.size(); ++n) {
      if (tree.node(n).is_leaf()) CHECK(sizes[n] >= 10);
    }
  }
  CHECK_THROWS(best_depth2(data, 4));
}

TEST_CASE("depth-two dispatch agrees with the general recurrence") {
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 15; ++rep) {
    const auto data = with_hazard(oracle::random_dataset(rng, 100, 8));
    SolverConfig with = oracle::budget(2, 3);
    SolverConfig without = with;
    without.use_depth2 = false;
    CHECK(solve(data, with).loss == doctest::Approx(solve(data, without).loss).epsilon(1e-9));
  }
}

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "survtree/dataset.hpp"
#include "survtree/loss.hpp"
#include "survtree/tree.hpp"

namespace survtree {

// Cost tuples of a dataset and of every feature and feature pair, counted
// in a "held" polarity: features held by more than half the instances are
// flipped so that per-instance pair enumeration stays sparse. Accessors
// below the counting layer (complement_sums) translate back to the original
// polarity.
struct PairwiseSums {
  std::size_t feature_count = 0;
  std::vector<bool> flipped;

  CostTuple total;
  std::uint32_t total_count = 0;
  std::vector<CostTuple> single;
  std::vector<std::uint32_t> single_count;
  // Square feature_count x feature_count, only i < j filled.
  std::vector<CostTuple> pair;
  std::vector<std::uint32_t> pair_count;

  // Instance-pair visits during counting and the largest held-feature count.
  std::uint64_t pair_visits = 0;
  std::size_t max_held = 0;

  // Tuple / count of instances holding both (held-polarity) features.
  CostTuple held_pair(std::size_t i, std::size_t j) const;
  std::uint32_t held_pair_count(std::size_t i, std::size_t j) const;
};

PairwiseSums precompute(const Dataset& data, std::span<const std::uint32_t> indices,
                        bool flip = true);
PairwiseSums precompute(const Dataset& data, bool flip = true);

// The four leaves of splitting on f_i then f_j, in original polarity.
struct QuadrantSums {
  CostTuple both;        // f_i and f_j
  CostTuple only_i;      // f_i and not f_j
  CostTuple only_j;      // not f_i and f_j
  CostTuple neither;     // not f_i and not f_j
  std::array<std::uint32_t, 4> counts{};  // same order
};

QuadrantSums complement_sums(const PairwiseSums& sums, std::size_t i, std::size_t j);

// Optimal tree of depth at most two for one node budget, as feature choices
// in original polarity. root < 0 means a single leaf; left/right < 0 mean
// that child is a leaf.
struct Depth2Choice {
  double loss = 0.0;
  int root = -1;
  int left = -1;
  int right = -1;
};

// Optimal choices for node budgets 1, 2 and 3 (index 0, 1, 2). Splits
// leaving fewer than min_leaf_size instances on a side are skipped.
std::array<Depth2Choice, 3> solve_depth2(const PairwiseSums& sums, std::size_t min_leaf_size = 1);

// Tree for a choice, with thetas fitted on the given instances.
SurvivalTree build_depth2_tree(const Depth2Choice& choice, const Dataset& data,
                               std::span<const std::uint32_t> indices);

struct Depth2Result {
  SurvivalTree tree;
  double loss = 0.0;
};

Depth2Result best_depth2(const Dataset& data, int nodes, std::size_t min_leaf_size = 1);

}  // namespace survtree

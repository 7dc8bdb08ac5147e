#include "survtree/depth2.hpp"

#include <numeric>
#include <string>

#include "survtree/error.hpp"

namespace survtree {

CostTuple PairwiseSums::held_pair(std::size_t i, std::size_t j) const {
  if (i == j) return single[i];
  if (i > j) std::swap(i, j);
  return pair[i * feature_count + j];
}

std::uint32_t PairwiseSums::held_pair_count(std::size_t i, std::size_t j) const {
  if (i == j) return single_count[i];
  if (i > j) std::swap(i, j);
  return pair_count[i * feature_count + j];
}

PairwiseSums precompute(const Dataset& data, std::span<const std::uint32_t> indices, bool flip) {
  const std::size_t nf = data.feature_count();
  PairwiseSums sums;
  sums.feature_count = nf;
  sums.flipped.assign(nf, false);
  sums.single.assign(nf, CostTuple{});
  sums.single_count.assign(nf, 0);
  sums.pair.assign(nf * nf, CostTuple{});
  sums.pair_count.assign(nf * nf, 0);

  const std::size_t words = (nf + 63) / 64;
  std::vector<std::uint64_t> flip_mask(words, 0);
  if (flip) {
    std::vector<std::uint32_t> held(nf, 0);
    for (auto i : indices) {
      const auto& w = data[i].features.words();
      for (std::size_t k = 0; k < words; ++k) {
        for (std::uint64_t bits = w[k]; bits != 0; bits &= bits - 1) {
          ++held[k * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))];
        }
      }
    }
    for (std::size_t f = 0; f < nf; ++f) {
      if (2 * static_cast<std::size_t>(held[f]) > indices.size()) {
        sums.flipped[f] = true;
        flip_mask[f >> 6] |= std::uint64_t{1} << (f & 63);
      }
    }
  }

  std::vector<std::size_t> held_list;
  held_list.reserve(nf);
  for (auto i : indices) {
    const CostTuple x = instance_tuple(data, i);
    sums.total += x;
    ++sums.total_count;

    held_list.clear();
    const auto& w = data[i].features.words();
    for (std::size_t k = 0; k < words; ++k) {
      for (std::uint64_t bits = w[k] ^ flip_mask[k]; bits != 0; bits &= bits - 1) {
        held_list.push_back(k * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
      }
    }
    if (held_list.size() > sums.max_held) sums.max_held = held_list.size();

    for (std::size_t a = 0; a < held_list.size(); ++a) {
      const std::size_t fa = held_list[a];
      sums.single[fa] += x;
      ++sums.single_count[fa];
      const std::size_t row = fa * nf;
      for (std::size_t b = a + 1; b < held_list.size(); ++b) {
        sums.pair[row + held_list[b]] += x;
        ++sums.pair_count[row + held_list[b]];
      }
      sums.pair_visits += held_list.size() - a - 1;
    }
  }
  return sums;
}

PairwiseSums precompute(const Dataset& data, bool flip) {
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  return precompute(data, all, flip);
}

namespace {

// Tuples and counts of the four (held_i, held_j) quadrants.
struct HeldQuadrants {
  CostTuple t[2][2];
  std::uint32_t c[2][2];
};

HeldQuadrants held_quadrants(const PairwiseSums& s, std::size_t i, std::size_t j) {
  HeldQuadrants q;
  const CostTuple hh = s.held_pair(i, j);
  const std::uint32_t chh = s.held_pair_count(i, j);
  q.t[1][1] = hh;
  q.t[1][0] = s.single[i] - hh;
  q.t[0][1] = s.single[j] - hh;
  q.t[0][0] = s.total - s.single[i] - s.single[j] + hh;
  q.c[1][1] = chh;
  q.c[1][0] = s.single_count[i] - chh;
  q.c[0][1] = s.single_count[j] - chh;
  q.c[0][0] = s.total_count - s.single_count[i] - s.single_count[j] + chh;
  return q;
}

}  // namespace

QuadrantSums complement_sums(const PairwiseSums& sums, std::size_t i, std::size_t j) {
  if (i >= sums.feature_count || j >= sums.feature_count) {
    throw StructuralError("feature index out of range in complement_sums");
  }
  const auto q = held_quadrants(sums, i, j);
  // Original predicate true <=> held bit differs from the flip flag.
  const int ti = sums.flipped[i] ? 0 : 1;
  const int tj = sums.flipped[j] ? 0 : 1;
  QuadrantSums out;
  out.both = q.t[ti][tj];
  out.only_i = q.t[ti][1 - tj];
  out.only_j = q.t[1 - ti][tj];
  out.neither = q.t[1 - ti][1 - tj];
  out.counts = {q.c[ti][tj], q.c[ti][1 - tj], q.c[1 - ti][tj], q.c[1 - ti][1 - tj]};
  return out;
}

std::array<Depth2Choice, 3> solve_depth2(const PairwiseSums& s, std::size_t min_leaf_size) {
  const std::size_t nf = s.feature_count;
  const std::uint32_t min_leaf = static_cast<std::uint32_t>(min_leaf_size);

  std::array<Depth2Choice, 3> best;
  const double root_leaf = leaf_loss(s.total);
  for (auto& b : best) b = Depth2Choice{root_leaf, -1, -1, -1};

  struct Side {
    double leaf = 0.0;
    double split = 0.0;
    int feature = -1;
  };

  for (std::size_t i = 0; i < nf; ++i) {
    const std::uint32_t held_count = s.single_count[i];
    const std::uint32_t other_count = s.total_count - held_count;
    if (held_count < min_leaf || other_count < min_leaf) continue;

    // Sides indexed by the held bit of feature i.
    Side side[2];
    side[1].leaf = leaf_loss(s.single[i]);
    side[0].leaf = leaf_loss(s.total - s.single[i]);
    for (auto& sd : side) {
      sd.split = sd.leaf;
      sd.feature = -1;
    }
    for (std::size_t j = 0; j < nf; ++j) {
      const auto q = held_quadrants(s, i, j);
      for (int h = 0; h < 2; ++h) {
        if (q.c[h][0] < min_leaf || q.c[h][1] < min_leaf) continue;
        const double v = leaf_loss(q.t[h][0]) + leaf_loss(q.t[h][1]);
        if (v < side[h].split) {
          side[h].split = v;
          side[h].feature = static_cast<int>(j);
        }
      }
    }

    // Left child takes the original predicate false.
    const Side& left = side[s.flipped[i] ? 1 : 0];
    const Side& right = side[s.flipped[i] ? 0 : 1];
    const int root = static_cast<int>(i);

    const double one = left.leaf + right.leaf;
    Depth2Choice c1{one, root, -1, -1};
    Depth2Choice c2 = c1;
    if (left.feature >= 0 && left.split + right.leaf < c2.loss) {
      c2 = {left.split + right.leaf, root, left.feature, -1};
    }
    if (right.feature >= 0 && left.leaf + right.split < c2.loss) {
      c2 = {left.leaf + right.split, root, -1, right.feature};
    }
    Depth2Choice c3 = c2;
    if (left.feature >= 0 && right.feature >= 0 && left.split + right.split < c3.loss) {
      c3 = {left.split + right.split, root, left.feature, right.feature};
    }

    if (c1.loss < best[0].loss) best[0] = c1;
    if (c2.loss < best[1].loss) best[1] = c2;
    if (c3.loss < best[2].loss) best[2] = c3;
  }
  return best;
}

SurvivalTree build_depth2_tree(const Depth2Choice& choice, const Dataset& data,
                               std::span<const std::uint32_t> indices) {
  if (choice.root < 0) return fit_leaf_thetas(SurvivalTree{}, data, indices);
  auto child = [](int feature) {
    return feature < 0 ? SurvivalTree{}
                       : SurvivalTree::split(static_cast<std::size_t>(feature), SurvivalTree{},
                                             SurvivalTree{});
  };
  const SurvivalTree shape = SurvivalTree::split(static_cast<std::size_t>(choice.root),
                                                 child(choice.left), child(choice.right));
  return fit_leaf_thetas(shape, data, indices);
}

Depth2Result best_depth2(const Dataset& data, int nodes, std::size_t min_leaf_size) {
  if (nodes < 1 || nodes > 3) {
    throw DomainError("depth-two node budget must be 1, 2 or 3, got " + std::to_string(nodes));
  }
  if (data.empty()) throw DomainError("best_depth2 on an empty dataset");
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  const auto choices = solve_depth2(precompute(data, all), min_leaf_size);
  const auto& c = choices[static_cast<std::size_t>(nodes - 1)];
  return {build_depth2_tree(c, data, all), c.loss};
}

}  // namespace survtree

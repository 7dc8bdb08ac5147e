#include "survtree/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survtree/error.hpp"

namespace survtree {

double theta_hat(const CostTuple& tuple) {
  if (!(tuple.hs > 0.0)) throw DegenerateLeafError("theta is undefined for a zero hazard sum");
  if (tuple.es > 0.0) return tuple.es / tuple.hs;
  return 1.0 / (2.0 * tuple.hs);
}

double leaf_theta(const CostTuple& tuple) { return tuple.hs > 0.0 ? theta_hat(tuple) : 1.0; }

double leaf_loss(const CostTuple& tuple) {
  // nlhs only collects event terms, so it is zero whenever es is.
  if (tuple.es <= 0.0) return 0.0;
  if (!(tuple.hs > 0.0)) throw DegenerateLeafError("events in a leaf without hazard mass");
  return std::max(0.0, tuple.nlhs - tuple.es * std::log(tuple.es / tuple.hs));
}

double leaf_loss_direct(const Dataset& data, std::span<const std::uint32_t> indices,
                        double theta) {
  const double log_theta = std::log(theta);
  double sum = 0.0;
  for (auto i : indices) {
    const double h = data.hazard(i);
    sum += h * theta;
    if (data[i].event) sum += -std::log(h) - log_theta - 1.0;
  }
  return sum;
}

double leaf_loss_direct(const Dataset& data, double theta) {
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  return leaf_loss_direct(data, all, theta);
}

CostTuple tuple_of(const Dataset& data, std::span<const std::uint32_t> indices) {
  CostTuple t;
  for (auto i : indices) t += instance_tuple(data, i);
  return t;
}

CostTuple tuple_of(const Dataset& data) {
  CostTuple t;
  for (std::size_t i = 0; i < data.size(); ++i) t += instance_tuple(data, i);
  return t;
}

double normalized_loss(double tree_loss, double root_leaf_loss) {
  if (!(root_leaf_loss > 0.0)) {
    throw DomainError("normalized loss is undefined when the single-leaf loss is zero");
  }
  return 1.0 - tree_loss / root_leaf_loss;
}

namespace {

std::vector<CostTuple> leaf_tuples(const SurvivalTree& tree, const Dataset& data,
                                   std::span<const std::uint32_t> indices) {
  std::vector<CostTuple> per_node(tree.nodes().size());
  for (auto i : indices) per_node[tree.leaf_index(data[i].features)] += instance_tuple(data, i);
  return per_node;
}

}  // namespace

double tree_loss(const SurvivalTree& tree, const Dataset& data) {
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  const auto per_node = leaf_tuples(tree, data, all);
  double sum = 0.0;
  for (std::size_t i = 0; i < per_node.size(); ++i) {
    if (tree.node(i).is_leaf()) sum += leaf_loss(per_node[i]);
  }
  return sum;
}

SurvivalTree fit_leaf_thetas(const SurvivalTree& tree, const Dataset& data,
                             std::span<const std::uint32_t> indices) {
  const auto per_node = leaf_tuples(tree, data, indices);
  SurvivalTree out = tree;
  for (std::size_t i = 0; i < per_node.size(); ++i) {
    if (tree.node(i).is_leaf()) out.set_theta(i, leaf_theta(per_node[i]));
  }
  return out;
}

}  // namespace survtree

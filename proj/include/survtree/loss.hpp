#pragma once

#include <cstdint>
#include <span>

#include "survtree/dataset.hpp"
#include "survtree/tree.hpp"

namespace survtree {

// Sufficient statistics of a leaf: event sum, hazard sum and negative log
// hazard sum. Any leaf loss is a function of these three numbers.
struct CostTuple {
  double es = 0.0;
  double hs = 0.0;
  double nlhs = 0.0;

  CostTuple& operator+=(const CostTuple& o) {
    es += o.es;
    hs += o.hs;
    nlhs += o.nlhs;
    return *this;
  }
  CostTuple& operator-=(const CostTuple& o) {
    es -= o.es;
    hs -= o.hs;
    nlhs -= o.nlhs;
    return *this;
  }
  friend CostTuple operator+(CostTuple a, const CostTuple& b) { return a += b; }
  friend CostTuple operator-(CostTuple a, const CostTuple& b) { return a -= b; }
  friend bool operator==(const CostTuple&, const CostTuple&) = default;
};

// Contribution of instance i of a dataset with cached hazards.
inline CostTuple instance_tuple(const Dataset& data, std::size_t i) {
  return {data[i].event ? 1.0 : 0.0, data.hazard(i), data.neg_log_hazard(i)};
}

// Maximum-likelihood theta es/hs; 1/(2 hs) when the leaf has no events.
// Throws DegenerateLeafError when hs == 0.
double theta_hat(const CostTuple& tuple);

// Theta reported for a leaf: theta_hat, or 1 for a leaf without hazard mass.
double leaf_theta(const CostTuple& tuple);

// nlhs - es * log(es / hs), with the es == 0 term taken as 0.
double leaf_loss(const CostTuple& tuple);

// Per-instance likelihood loss summed over the data at a fixed theta.
double leaf_loss_direct(const Dataset& data, double theta);
double leaf_loss_direct(const Dataset& data, std::span<const std::uint32_t> indices,
                        double theta);

CostTuple tuple_of(const Dataset& data);
CostTuple tuple_of(const Dataset& data, std::span<const std::uint32_t> indices);

// 1 - tree_loss / root_leaf_loss.
double normalized_loss(double tree_loss, double root_leaf_loss);

// Sum of leaf losses with theta re-estimated on the data reaching each leaf.
double tree_loss(const SurvivalTree& tree, const Dataset& data);

// Copy of `tree` with every leaf theta set to leaf_theta of its data.
SurvivalTree fit_leaf_thetas(const SurvivalTree& tree, const Dataset& data,
                             std::span<const std::uint32_t> indices);

}  // namespace survtree

#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "survtree/baseline.hpp"
#include "survtree/feature_vector.hpp"

namespace survtree {

// Binary tree of feature splits with a proportional-hazard coefficient at
// each leaf. Instances with the split feature false go left, true go right.
// Nodes are stored flat; index 0 is the root.
class SurvivalTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double theta = 1.0;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  SurvivalTree() : nodes_{Node{}} {}

  static SurvivalTree leaf(double theta);
  static SurvivalTree split(std::size_t feature, SurvivalTree left, SurvivalTree right);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  void set_theta(std::size_t leaf_index, double theta);

  int depth() const;
  int branch_count() const;
  int leaf_count() const;

  // Index (into nodes()) of the leaf reached by `features`.
  std::size_t leaf_index(const FeatureVector& features) const;

  friend bool operator==(const SurvivalTree&, const SurvivalTree&) = default;

 private:
  std::vector<Node> nodes_;
};

double predict_theta(const SurvivalTree& tree, const FeatureVector& features);
double predict_survival(const SurvivalTree& tree, const BaselineHazard& baseline,
                        const FeatureVector& features, double t);

nlohmann::json to_json(const SurvivalTree& tree);
SurvivalTree tree_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const BaselineHazard& baseline);
BaselineHazard baseline_from_json(const nlohmann::json& doc);

}  // namespace survtree

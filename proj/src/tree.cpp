#include "survtree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "survtree/error.hpp"

namespace survtree {

SurvivalTree SurvivalTree::leaf(double theta) {
  SurvivalTree tree;
  tree.nodes_[0].theta = theta;
  return tree;
}

SurvivalTree SurvivalTree::split(std::size_t feature, SurvivalTree left, SurvivalTree right) {
  SurvivalTree tree;
  tree.nodes_.reserve(1 + left.nodes_.size() + right.nodes_.size());
  tree.nodes_[0].feature = static_cast<int>(feature);

  auto append = [&tree](const SurvivalTree& sub) {
    const int offset = static_cast<int>(tree.nodes_.size());
    for (Node n : sub.nodes_) {
      if (!n.is_leaf()) {
        n.left += offset;
        n.right += offset;
      }
      tree.nodes_.push_back(n);
    }
    return offset;
  };
  const int l = append(left);
  const int r = append(right);
  tree.nodes_[0].left = l;
  tree.nodes_[0].right = r;
  return tree;
}

void SurvivalTree::set_theta(std::size_t leaf_index, double theta) {
  if (leaf_index >= nodes_.size() || !nodes_[leaf_index].is_leaf()) {
    throw StructuralError("set_theta on a node that is not a leaf");
  }
  nodes_[leaf_index].theta = theta;
}

namespace {

int depth_of(const std::vector<SurvivalTree::Node>& nodes, int i) {
  const auto& n = nodes[static_cast<std::size_t>(i)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_of(nodes, n.left), depth_of(nodes, n.right));
}

}  // namespace

int SurvivalTree::depth() const { return depth_of(nodes_, 0); }

int SurvivalTree::branch_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                        [](const Node& n) { return !n.is_leaf(); }));
}

int SurvivalTree::leaf_count() const { return static_cast<int>(nodes_.size()) - branch_count(); }

std::size_t SurvivalTree::leaf_index(const FeatureVector& features) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto f = static_cast<std::size_t>(nodes_[i].feature);
    if (f >= features.size()) {
      throw StructuralError("tree splits on feature " + std::to_string(f) +
                            " but the feature vector has length " +
                            std::to_string(features.size()));
    }
    i = static_cast<std::size_t>(features[f] ? nodes_[i].right : nodes_[i].left);
  }
  return i;
}

double predict_theta(const SurvivalTree& tree, const FeatureVector& features) {
  return tree.node(tree.leaf_index(features)).theta;
}

double predict_survival(const SurvivalTree& tree, const BaselineHazard& baseline,
                        const FeatureVector& features, double t) {
  return std::exp(-predict_theta(tree, features) * eval_cumulative_hazard(baseline, t));
}

namespace {

nlohmann::json node_to_json(const SurvivalTree& tree, std::size_t i) {
  const auto& n = tree.node(i);
  if (n.is_leaf()) return {{"theta", n.theta}};
  return {{"feature", n.feature},
          {"left", node_to_json(tree, static_cast<std::size_t>(n.left))},
          {"right", node_to_json(tree, static_cast<std::size_t>(n.right))}};
}

SurvivalTree node_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw StructuralError("tree node must be a JSON object");
  if (doc.contains("theta")) {
    const double theta = doc.at("theta").get<double>();
    if (!(theta > 0.0)) throw StructuralError("leaf theta must be positive");
    return SurvivalTree::leaf(theta);
  }
  if (!doc.contains("feature") || !doc.contains("left") || !doc.contains("right")) {
    throw StructuralError("tree node needs either theta or feature/left/right");
  }
  const auto feature = doc.at("feature").get<long long>();
  if (feature < 0) throw StructuralError("negative split feature");
  return SurvivalTree::split(static_cast<std::size_t>(feature), node_from_json(doc.at("left")),
                             node_from_json(doc.at("right")));
}

}  // namespace

nlohmann::json to_json(const SurvivalTree& tree) { return node_to_json(tree, 0); }

SurvivalTree tree_from_json(const nlohmann::json& doc) {
  try {
    return node_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed tree JSON: ") + e.what());
  }
}

nlohmann::json to_json(const BaselineHazard& baseline) {
  return {{"times", baseline.times()},
          {"cumulative_hazard", baseline.cumulative_hazards()},
          {"survival", baseline.survivals()}};
}

BaselineHazard baseline_from_json(const nlohmann::json& doc) {
  try {
    return BaselineHazard(doc.at("times").get<std::vector<double>>(),
                          doc.at("cumulative_hazard").get<std::vector<double>>(),
                          doc.at("survival").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed baseline JSON: ") + e.what());
  }
}

}  // namespace survtree

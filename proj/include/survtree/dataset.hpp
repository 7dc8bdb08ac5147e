#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "survtree/feature_vector.hpp"

namespace survtree {

class BaselineHazard;

// One right-censored observation.
struct Instance {
  double time = 0.0;
  bool event = false;
  FeatureVector features;
};

// Ordered collection of instances sharing one binary feature space.
//
// After with_baseline() every instance also carries the baseline cumulative
// hazard at its own time and the term -event * log(hazard). Those two values
// are what every leaf loss is built from, so they are computed once here.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t feature_count) : feature_count_(feature_count) {}
  Dataset(std::vector<Instance> instances, std::size_t feature_count);

  void add(Instance instance);

  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t feature_count() const { return feature_count_; }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Instance>& instances() const { return instances_; }

  std::vector<double> times() const;
  std::vector<int> events() const;

  bool has_hazard() const { return !hazard_.empty() || instances_.empty(); }
  double hazard(std::size_t i) const { return hazard_[i]; }
  double neg_log_hazard(std::size_t i) const { return neg_log_hazard_[i]; }

  // Copy carrying per-instance hazard values evaluated on `baseline`.
  // Events whose hazard is zero (only possible for held-out data) get a
  // zero neg-log term.
  Dataset with_baseline(const BaselineHazard& baseline) const;

  // Instances at the given positions, in that order. Cached hazard values
  // are carried along.
  Dataset subset(std::span<const std::uint32_t> indices) const;

 private:
  std::vector<Instance> instances_;
  std::size_t feature_count_ = 0;
  std::vector<double> hazard_;
  std::vector<double> neg_log_hazard_;
};

// Partition into (feature false, feature true), order preserved.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, std::size_t feature);

}  // namespace survtree

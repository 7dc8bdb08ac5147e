#include "survtree/dataset.hpp"

#include <cmath>
#include <string>

#include "survtree/baseline.hpp"
#include "survtree/error.hpp"

namespace survtree {

namespace {

void check_instance(const Instance& instance, std::size_t feature_count) {
  if (!(instance.time > 0.0) || !std::isfinite(instance.time)) {
    throw DomainError("instance time must be positive and finite, got " +
                      std::to_string(instance.time));
  }
  if (instance.features.size() != feature_count) {
    throw StructuralError("feature vector of length " + std::to_string(instance.features.size()) +
                          " in a dataset with " + std::to_string(feature_count) + " features");
  }
}

}  // namespace

Dataset::Dataset(std::vector<Instance> instances, std::size_t feature_count)
    : instances_(std::move(instances)), feature_count_(feature_count) {
  for (const auto& instance : instances_) check_instance(instance, feature_count_);
}

void Dataset::add(Instance instance) {
  check_instance(instance, feature_count_);
  instances_.push_back(std::move(instance));
  hazard_.clear();
  neg_log_hazard_.clear();
}

std::vector<double> Dataset::times() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& instance : instances_) out.push_back(instance.time);
  return out;
}

std::vector<int> Dataset::events() const {
  std::vector<int> out;
  out.reserve(size());
  for (const auto& instance : instances_) out.push_back(instance.event ? 1 : 0);
  return out;
}

Dataset Dataset::with_baseline(const BaselineHazard& baseline) const {
  Dataset out = *this;
  out.hazard_.resize(size());
  out.neg_log_hazard_.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double h = baseline.cumulative_hazard(instances_[i].time);
    out.hazard_[i] = h;
    out.neg_log_hazard_[i] = (instances_[i].event && h > 0.0) ? -std::log(h) : 0.0;
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::uint32_t> indices) const {
  Dataset out(feature_count_);
  out.instances_.reserve(indices.size());
  const bool cached = !hazard_.empty();
  if (cached) {
    out.hazard_.reserve(indices.size());
    out.neg_log_hazard_.reserve(indices.size());
  }
  for (auto i : indices) {
    out.instances_.push_back(instances_.at(i));
    if (cached) {
      out.hazard_.push_back(hazard_[i]);
      out.neg_log_hazard_.push_back(neg_log_hazard_[i]);
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, std::size_t feature) {
  if (feature >= data.feature_count()) {
    throw StructuralError("split feature " + std::to_string(feature) + " out of range (" +
                          std::to_string(data.feature_count()) + " features)");
  }
  std::vector<std::uint32_t> off;
  std::vector<std::uint32_t> on;
  for (std::uint32_t i = 0; i < data.size(); ++i) {
    (data[i].features[feature] ? on : off).push_back(i);
  }
  return {data.subset(off), data.subset(on)};
}

}  // namespace survtree

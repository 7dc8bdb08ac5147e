#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "survtree/io.hpp"

namespace survtree {

enum class RawKind { continuous, binary, categorical };

struct RawFeature {
  std::string name;
  RawKind kind = RawKind::continuous;
  int levels = 0;  // categorical only
};

// 3 continuous, 1 binary, categoricals with 3 and 5 levels; doubled: 6/2/4.
std::vector<RawFeature> synthetic_schema(bool doubled = false);

// Row-major numeric encoding: continuous value, binary 0/1, categorical
// level index.
struct FeatureTable {
  std::vector<RawFeature> schema;
  std::vector<std::vector<double>> rows;
};

FeatureTable generate_features(std::size_t n, std::uint64_t seed, bool doubled = false);

enum class Family { exponential, weibull, lognormal, gamma };

// One of the leaf distributions of the ground-truth menu.
struct LeafDistribution {
  Family family = Family::exponential;
  double a = 1.0;  // rate / shape / mu / shape
  double b = 0.0;  // - / scale / sigma^2 / scale

  double sample(std::mt19937_64& rng) const;
  std::string name() const;
};

// The 32 options: 8 each of Exponential(rate), Weibull(shape, scale),
// Lognormal(mu, sigma^2), Gamma(shape, scale).
const std::array<LeafDistribution, 32>& distribution_menu();

// Complete depth-5 tree over raw features. Predicate true goes right:
// continuous x <= threshold, binary x == 1, categorical level in subset.
struct GroundTruthTree {
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    std::uint32_t level_mask = 0;
    int left = -1;
    int right = -1;
    LeafDistribution distribution;
  };
  std::vector<RawFeature> schema;
  std::vector<Node> nodes;

  std::size_t leaf_of(std::span<const double> row) const;
  int depth() const;
};

GroundTruthTree generate_tree(std::uint64_t seed, const std::vector<RawFeature>& schema,
                              int depth = 5);

struct EventTimes {
  std::vector<double> times;
  std::vector<double> u;
};

EventTimes assign_times(const GroundTruthTree& tree, const FeatureTable& table, std::uint64_t seed);

struct CensoredTimes {
  std::vector<double> times;
  std::vector<int> events;
  double k = 0.0;
  std::size_t censored = 0;
};

// Smallest k with at most floor(c n) observations satisfying k(1-u^2) < t;
// those are censored at k(1-u^2).
CensoredTimes apply_censoring(std::span<const double> times, std::span<const double> u,
                              double c);

struct GenConfig {
  std::size_t n = 1000;
  double censoring = 0.0;
  std::uint64_t seed = 0;
  bool doubled = false;
};

struct SyntheticData {
  FeatureTable features;
  CensoredTimes outcome;
};

// Ground-truth tree for a configuration (seed stream independent of n).
GroundTruthTree ground_truth_for(const GenConfig& config);

// Training sample: features, times, censoring on stream 0 of the seed.
// Test samples use stream 1 with the same tree.
SyntheticData generate_sample(const GroundTruthTree& tree, std::size_t n, double c,
                              std::uint64_t seed, int stream);

CsvTable to_csv(const SyntheticData& data);
nlohmann::json to_json(const GroundTruthTree& tree);

}  // namespace survtree

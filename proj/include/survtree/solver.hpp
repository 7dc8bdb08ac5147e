#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "survtree/dataset.hpp"
#include "survtree/depth2.hpp"
#include "survtree/error.hpp"
#include "survtree/tree.hpp"

namespace survtree {

struct SolverConfig {
  int max_depth = 3;
  int max_nodes = 7;
  std::size_t min_leaf_size = 1;
  bool use_depth2 = true;
  // Upper-bound pruning and cached lower bounds. Off only for testing.
  bool use_bounds = true;
  std::optional<double> time_limit;  // seconds
};

// Depth and branching-node budget of a subproblem.
struct Budget {
  int depth = 0;
  int nodes = 0;
  friend bool operator==(const Budget&, const Budget&) = default;
};

// Clamp nodes to 2^depth - 1, then depth to nodes.
Budget normalize_budget(int depth, int nodes);

struct SubproblemKey {
  std::vector<std::uint32_t> subset;  // sorted instance indices
  Budget budget;

  SubproblemKey normalized() const { return {subset, normalize_budget(budget.depth, budget.nodes)}; }
};

enum class EntryStatus { optimal, lower_bound };

struct SplitRecord {
  std::size_t feature = 0;
  int left_nodes = 0;
  int right_nodes = 0;
};

struct CacheEntry {
  double value = 0.0;
  EntryStatus status = EntryStatus::optimal;
  std::optional<SplitRecord> split;  // empty for a leaf or a lower bound
};

struct SolverStats {
  std::uint64_t subproblems = 0;   // general searches run
  std::uint64_t cache_hits = 0;
  std::uint64_t depth2_calls = 0;
  std::uint64_t subsets = 0;       // distinct subsets stored
};

struct SolveResult {
  SurvivalTree tree;
  double loss = 0.0;
  bool optimal = true;
};

// Raised when the time limit expires; carries the best tree found so far.
class SolverTimeout : public Error {
 public:
  explicit SolverTimeout(SolveResult incumbent)
      : Error("solver time limit exceeded"), incumbent_(std::move(incumbent)) {}
  const SolveResult& incumbent() const { return incumbent_; }

 private:
  SolveResult incumbent_;
};

// Dynamic program over (instance subset, depth, node budget) with a
// persistent cache. Repeated solve() calls with different budgets reuse
// every cached subproblem. The dataset must carry cached hazards and must
// outlive the solver.
class Solver {
 public:
  Solver(const Dataset& data, SolverConfig config);

  SolveResult solve() { return solve(config_.max_depth, config_.max_nodes); }
  SolveResult solve(int depth, int nodes);

  // Optimal entry if the optimum is below upper_bound, otherwise possibly a
  // lower-bound entry whose value is at least upper_bound.
  CacheEntry solve_subproblem(const SubproblemKey& key, double upper_bound);

  // Tree of an optimally solved subproblem; throws ConsistencyError when the
  // cache does not hold it.
  SurvivalTree reconstruct(const SubproblemKey& key) const;

  void clear_cache();
  const SolverStats& stats() const { return stats_; }
  const SolverConfig& config() const { return config_; }

 private:
  struct Record {
    std::vector<std::uint32_t> indices;
    std::vector<std::pair<Budget, CacheEntry>> entries;
    std::optional<double> leaf;
    std::optional<std::array<Depth2Choice, 3>> depth2;
    // Per feature: (false side, true side), both null when the split is
    // not allowed. Filled on first expansion.
    std::vector<std::array<Record*, 2>> children;
  };

  struct TimeLimitHit {};

  Record& intern(std::vector<std::uint32_t> indices);
  const Record* find(std::span<const std::uint32_t> indices) const;
  static const CacheEntry* lookup(const Record& rec, Budget b);
  static void store(Record& rec, Budget b, const CacheEntry& entry);

  CacheEntry search(Record& rec, Budget b, double upper_bound, bool is_root);
  CacheEntry from_depth2(Record& rec, Budget b);
  double leaf_value(Record& rec) const;
  double lower_bound_of(Record& rec, Budget b) const;
  void expand(Record& rec);
  SurvivalTree rebuild(std::span<const std::uint32_t> indices, Budget b) const;
  void check_time();

  const Dataset& data_;
  SolverConfig config_;
  SolverStats stats_;
  std::unordered_map<std::uint64_t, std::vector<std::unique_ptr<Record>>> cache_;

  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::uint32_t clock_ticks_ = 0;
  // Best complete split at the root of the running solve(), for timeouts.
  std::optional<SplitRecord> root_incumbent_;
  double root_incumbent_value_ = 0.0;
};

// One-shot solve at the configured budgets.
SolveResult solve(const Dataset& data, const SolverConfig& config);

}  // namespace survtree

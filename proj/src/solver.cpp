#include "survtree/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "survtree/loss.hpp"

namespace survtree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t digest(std::span<const std::uint32_t> indices) {
  std::uint64_t h = mix(indices.size());
  for (auto i : indices) h = mix(h ^ i);
  return h;
}

std::vector<std::uint32_t> all_indices(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

}  // namespace

Budget normalize_budget(int depth, int nodes) {
  if (depth < 0 || nodes < 0) throw DomainError("depth and node budget must be nonnegative");
  if (depth < 31) nodes = std::min(nodes, (1 << depth) - 1);
  depth = std::min(depth, nodes);
  return {depth, nodes};
}

Solver::Solver(const Dataset& data, SolverConfig config) : data_(data), config_(config) {
  if (data_.empty()) throw DomainError("cannot solve on an empty dataset");
  if (!data_.has_hazard()) throw DomainError("dataset has no cached baseline hazard");
  if (config_.min_leaf_size < 1) throw DomainError("min_leaf_size must be at least 1");
  normalize_budget(config_.max_depth, config_.max_nodes);
}

void Solver::clear_cache() {
  cache_.clear();
  stats_ = SolverStats{};
}

const Solver::Record* Solver::find(std::span<const std::uint32_t> indices) const {
  auto it = cache_.find(digest(indices));
  if (it == cache_.end()) return nullptr;
  for (const auto& rec : it->second) {
    if (std::equal(rec->indices.begin(), rec->indices.end(), indices.begin(), indices.end())) {
      return rec.get();
    }
  }
  return nullptr;
}

Solver::Record& Solver::intern(std::vector<std::uint32_t> indices) {
  auto& bucket = cache_[digest(indices)];
  for (auto& rec : bucket) {
    if (rec->indices == indices) return *rec;
  }
  auto rec = std::make_unique<Record>();
  rec->indices = std::move(indices);
  bucket.push_back(std::move(rec));
  ++stats_.subsets;
  return *bucket.back();
}

const CacheEntry* Solver::lookup(const Record& rec, Budget b) {
  for (const auto& [budget, entry] : rec.entries) {
    if (budget == b) return &entry;
  }
  return nullptr;
}

void Solver::store(Record& rec, Budget b, const CacheEntry& entry) {
  for (auto& [budget, existing] : rec.entries) {
    if (budget != b) continue;
    // Optimal entries are final; lower bounds only move up.
    if (existing.status == EntryStatus::optimal) return;
    if (entry.status == EntryStatus::optimal || entry.value > existing.value) existing = entry;
    return;
  }
  rec.entries.emplace_back(b, entry);
}

double Solver::leaf_value(Record& rec) const {
  if (!rec.leaf) rec.leaf = leaf_loss(tuple_of(data_, rec.indices));
  return *rec.leaf;
}

double Solver::lower_bound_of(Record& rec, Budget b) const {
  if (b.nodes == 0) return leaf_value(rec);
  if (const auto* e = lookup(rec, b)) return e->value;
  return 0.0;
}

void Solver::expand(Record& rec) {
  if (!rec.children.empty()) return;
  const std::size_t nf = data_.feature_count();
  rec.children.assign(nf, {nullptr, nullptr});
  std::vector<std::uint32_t> off;
  std::vector<std::uint32_t> on;
  off.reserve(rec.indices.size());
  on.reserve(rec.indices.size());
  for (std::size_t f = 0; f < nf; ++f) {
    off.clear();
    on.clear();
    for (auto i : rec.indices) (data_[i].features[f] ? on : off).push_back(i);
    if (off.size() < config_.min_leaf_size || on.size() < config_.min_leaf_size) continue;
    Record* l = &intern(off);
    Record* r = &intern(on);
    rec.children[f] = {l, r};
  }
}

void Solver::check_time() {
  if (!deadline_) return;
  if ((++clock_ticks_ & 63u) != 0) return;
  if (std::chrono::steady_clock::now() > *deadline_) throw TimeLimitHit{};
}

CacheEntry Solver::from_depth2(Record& rec, Budget b) {
  if (!rec.depth2) {
    rec.depth2 = solve_depth2(precompute(data_, rec.indices), config_.min_leaf_size);
    ++stats_.depth2_calls;
  }
  const Depth2Choice& c = (*rec.depth2)[static_cast<std::size_t>(b.nodes - 1)];
  CacheEntry entry{c.loss, EntryStatus::optimal, std::nullopt};
  if (c.root >= 0) {
    entry.split = SplitRecord{static_cast<std::size_t>(c.root), c.left >= 0 ? 1 : 0,
                              c.right >= 0 ? 1 : 0};
  }
  store(rec, b, entry);
  return entry;
}

CacheEntry Solver::search(Record& rec, Budget b, double upper_bound, bool is_root) {
  if (b.nodes == 0) return {leaf_value(rec), EntryStatus::optimal, std::nullopt};

  if (const auto* e = lookup(rec, b)) {
    if (e->status == EntryStatus::optimal || (config_.use_bounds && e->value >= upper_bound)) {
      ++stats_.cache_hits;
      return *e;
    }
  }
  if (config_.use_depth2 && b.depth <= 2) return from_depth2(rec, b);

  check_time();
  ++stats_.subproblems;

  const bool bounded = config_.use_bounds;
  const double ub = bounded ? upper_bound : kInf;
  double best = leaf_value(rec);
  std::optional<SplitRecord> best_split;
  if (is_root) {
    root_incumbent_.reset();
    root_incumbent_value_ = best;
  }

  expand(rec);
  std::vector<std::pair<int, int>> tried;
  for (std::size_t f = 0; f < rec.children.size(); ++f) {
    auto [left, right] = rec.children[f];
    if (left == nullptr) continue;
    tried.clear();
    for (int nl = 0; nl < b.nodes; ++nl) {
      const Budget bl = normalize_budget(b.depth - 1, nl);
      const Budget br = normalize_budget(b.depth - 1, b.nodes - 1 - nl);
      if (std::find(tried.begin(), tried.end(), std::pair{bl.nodes, br.nodes}) != tried.end()) {
        continue;
      }
      tried.emplace_back(bl.nodes, br.nodes);

      const double bound = std::min(ub, best);
      if (bounded && bound <= 0.0) goto done;

      // Smaller child first; the other child's known lower bound tightens
      // the first child's budget.
      const bool left_first = left->indices.size() <= right->indices.size();
      Record& first = left_first ? *left : *right;
      Record& second = left_first ? *right : *left;
      const Budget bf = left_first ? bl : br;
      const Budget bs = left_first ? br : bl;

      const double lb_second = bounded ? lower_bound_of(second, bs) : 0.0;
      const CacheEntry e1 = search(first, bf, bound - lb_second, false);
      if (e1.status != EntryStatus::optimal) continue;
      if (bounded && e1.value >= bound - lb_second) continue;
      const CacheEntry e2 = search(second, bs, bound - e1.value, false);
      if (e2.status != EntryStatus::optimal) continue;

      const double total = left_first ? e1.value + e2.value : e2.value + e1.value;
      if (total < best) {
        best = total;
        best_split = SplitRecord{f, bl.nodes, br.nodes};
        if (is_root) {
          root_incumbent_ = best_split;
          root_incumbent_value_ = best;
        }
      }
    }
  }
done:
  CacheEntry entry;
  if (best < ub) {
    entry = {best, EntryStatus::optimal, best_split};
  } else {
    entry = {ub, EntryStatus::lower_bound, std::nullopt};
  }
  store(rec, b, entry);
  return entry;
}

CacheEntry Solver::solve_subproblem(const SubproblemKey& key, double upper_bound) {
  auto indices = key.subset;
  std::sort(indices.begin(), indices.end());
  Record& rec = intern(std::move(indices));
  return search(rec, normalize_budget(key.budget.depth, key.budget.nodes), upper_bound, false);
}

SurvivalTree Solver::rebuild(std::span<const std::uint32_t> indices, Budget b) const {
  if (b.nodes == 0) return fit_leaf_thetas(SurvivalTree{}, data_, indices);
  const Record* rec = find(indices);
  if (rec == nullptr) {
    throw ConsistencyError("no cached subproblem for a subset of " +
                           std::to_string(indices.size()) + " instances");
  }
  if (config_.use_depth2 && b.depth <= 2 && rec->depth2) {
    return build_depth2_tree((*rec->depth2)[static_cast<std::size_t>(b.nodes - 1)], data_,
                             indices);
  }
  const CacheEntry* entry = lookup(*rec, b);
  if (entry == nullptr || entry->status != EntryStatus::optimal) {
    throw ConsistencyError("subproblem (depth " + std::to_string(b.depth) + ", nodes " +
                           std::to_string(b.nodes) + ") is not solved to optimality");
  }
  if (!entry->split) return fit_leaf_thetas(SurvivalTree{}, data_, indices);

  const auto& s = *entry->split;
  std::vector<std::uint32_t> off;
  std::vector<std::uint32_t> on;
  for (auto i : indices) (data_[i].features[s.feature] ? on : off).push_back(i);
  return SurvivalTree::split(s.feature, rebuild(off, normalize_budget(b.depth - 1, s.left_nodes)),
                             rebuild(on, normalize_budget(b.depth - 1, s.right_nodes)));
}

SurvivalTree Solver::reconstruct(const SubproblemKey& key) const {
  auto indices = key.subset;
  std::sort(indices.begin(), indices.end());
  return rebuild(indices, normalize_budget(key.budget.depth, key.budget.nodes));
}

SolveResult Solver::solve(int depth, int nodes) {
  const Budget b = normalize_budget(depth, nodes);
  auto indices = all_indices(data_.size());
  Record& root = intern(indices);

  if (config_.time_limit) {
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(*config_.time_limit));
  }
  root_incumbent_.reset();
  root_incumbent_value_ = leaf_value(root);
  try {
    const CacheEntry e = search(root, b, kInf, true);
    deadline_.reset();
    return {rebuild(indices, b), e.value, true};
  } catch (const TimeLimitHit&) {
    deadline_.reset();
    SolveResult partial{fit_leaf_thetas(SurvivalTree{}, data_, indices), root_incumbent_value_,
                        false};
    if (root_incumbent_) {
      const auto& s = *root_incumbent_;
      std::vector<std::uint32_t> off;
      std::vector<std::uint32_t> on;
      for (auto i : indices) (data_[i].features[s.feature] ? on : off).push_back(i);
      partial.tree = SurvivalTree::split(
          s.feature, rebuild(off, normalize_budget(b.depth - 1, s.left_nodes)),
          rebuild(on, normalize_budget(b.depth - 1, s.right_nodes)));
    }
    throw SolverTimeout(std::move(partial));
  }
}

SolveResult solve(const Dataset& data, const SolverConfig& config) {
  Solver solver(data, config);
  return solver.solve();
}

}  // namespace survtree

#include "survtree/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "survtree/error.hpp"

namespace survtree {

namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Stream tags.
constexpr std::uint64_t kFeatures = 1;
constexpr std::uint64_t kTree = 2;
constexpr std::uint64_t kTimes = 3;

}  // namespace

std::vector<RawFeature> synthetic_schema(bool doubled) {
  const int copies = doubled ? 2 : 1;
  std::vector<RawFeature> s;
  for (int i = 0; i < 3 * copies; ++i) s.push_back({"x" + std::to_string(i + 1), RawKind::continuous, 0});
  for (int i = 0; i < copies; ++i) s.push_back({"b" + std::to_string(i + 1), RawKind::binary, 0});
  int cat = 1;
  for (int i = 0; i < copies; ++i) {
    s.push_back({"c" + std::to_string(cat++), RawKind::categorical, 3});
    s.push_back({"c" + std::to_string(cat++), RawKind::categorical, 5});
  }
  return s;
}

FeatureTable generate_features(std::size_t n, std::uint64_t seed, bool doubled) {
  FeatureTable table{synthetic_schema(doubled), {}};
  auto rng = stream_rng(seed, kFeatures);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  table.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    row.reserve(table.schema.size());
    for (const auto& f : table.schema) {
      switch (f.kind) {
        case RawKind::continuous: row.push_back(unit(rng)); break;
        case RawKind::binary: row.push_back(static_cast<double>(std::uniform_int_distribution<int>(0, 1)(rng))); break;
        case RawKind::categorical:
          row.push_back(static_cast<double>(std::uniform_int_distribution<int>(0, f.levels - 1)(rng)));
          break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

double LeafDistribution::sample(std::mt19937_64& rng) const {
  double t = 0.0;
  do {
    switch (family) {
      case Family::exponential: t = std::exponential_distribution<double>(a)(rng); break;
      case Family::weibull: t = std::weibull_distribution<double>(a, b)(rng); break;
      case Family::lognormal: t = std::lognormal_distribution<double>(a, std::sqrt(b))(rng); break;
      case Family::gamma: t = std::gamma_distribution<double>(a, b)(rng); break;
    }
  } while (!(t > 0.0) || !std::isfinite(t));
  return t;
}

std::string LeafDistribution::name() const {
  switch (family) {
    case Family::exponential: return "exponential";
    case Family::weibull: return "weibull";
    case Family::lognormal: return "lognormal";
    case Family::gamma: return "gamma";
  }
  return "exponential";
}

const std::array<LeafDistribution, 32>& distribution_menu() {
  using F = Family;
  static const std::array<LeafDistribution, 32> menu{{
      {F::exponential, 0.3, 0}, {F::exponential, 0.4, 0}, {F::exponential, 0.6, 0},
      {F::exponential, 0.8, 0}, {F::exponential, 0.9, 0}, {F::exponential, 1.15, 0},
      {F::exponential, 1.5, 0}, {F::exponential, 1.8, 0},
      {F::weibull, 0.8, 0.4}, {F::weibull, 0.9, 0.5}, {F::weibull, 0.9, 0.7},
      {F::weibull, 0.9, 1.1}, {F::weibull, 0.9, 1.5}, {F::weibull, 1.0, 1.1},
      {F::weibull, 1.0, 1.9}, {F::weibull, 1.3, 0.5},
      {F::lognormal, 0.1, 1.0}, {F::lognormal, 0.2, 0.75}, {F::lognormal, 0.3, 0.3},
      {F::lognormal, 0.3, 0.5}, {F::lognormal, 0.3, 0.8}, {F::lognormal, 0.4, 0.32},
      {F::lognormal, 0.5, 0.3}, {F::lognormal, 0.5, 0.7},
      {F::gamma, 0.2, 0.75}, {F::gamma, 0.3, 1.3}, {F::gamma, 0.3, 2.0},
      {F::gamma, 0.5, 1.5}, {F::gamma, 0.8, 1.0}, {F::gamma, 0.9, 1.3},
      {F::gamma, 1.3, 0.9}, {F::gamma, 1.5, 0.7},
  }};
  return menu;
}

std::size_t GroundTruthTree::leaf_of(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    const auto& f = schema[static_cast<std::size_t>(n.feature)];
    const double x = row[static_cast<std::size_t>(n.feature)];
    bool go_right = false;
    switch (f.kind) {
      case RawKind::continuous: go_right = x <= n.threshold; break;
      case RawKind::binary: go_right = x == 1.0; break;
      case RawKind::categorical:
        go_right = ((n.level_mask >> static_cast<unsigned>(x)) & 1u) != 0;
        break;
    }
    i = static_cast<std::size_t>(go_right ? n.right : n.left);
  }
  return i;
}

int GroundTruthTree::depth() const {
  std::function<int(std::size_t)> rec = [&](std::size_t i) -> int {
    if (nodes[i].feature < 0) return 0;
    return 1 + std::max(rec(static_cast<std::size_t>(nodes[i].left)),
                        rec(static_cast<std::size_t>(nodes[i].right)));
  };
  return rec(0);
}

GroundTruthTree generate_tree(std::uint64_t seed, const std::vector<RawFeature>& schema, int depth) {
  if (schema.empty()) throw DomainError("ground-truth tree needs at least one raw feature");
  GroundTruthTree tree;
  tree.schema = schema;
  auto rng = stream_rng(seed, kTree);
  std::uniform_int_distribution<std::size_t> pick_feature(0, schema.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_leaf(0, distribution_menu().size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::function<int(int)> grow = [&](int remaining) -> int {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (remaining == 0) {
      tree.nodes[static_cast<std::size_t>(index)].distribution = distribution_menu()[pick_leaf(rng)];
      return index;
    }
    GroundTruthTree::Node node;
    node.feature = static_cast<int>(pick_feature(rng));
    const auto& f = schema[static_cast<std::size_t>(node.feature)];
    if (f.kind == RawKind::continuous) {
      node.threshold = unit(rng);
    } else if (f.kind == RawKind::categorical) {
      // Nonempty proper subset of the levels.
      const std::uint32_t full = (1u << f.levels) - 1u;
      node.level_mask = std::uniform_int_distribution<std::uint32_t>(1, full - 1)(rng);
    }
    node.left = grow(remaining - 1);
    node.right = grow(remaining - 1);
    tree.nodes[static_cast<std::size_t>(index)] = node;
    return index;
  };
  grow(depth);
  return tree;
}

EventTimes assign_times(const GroundTruthTree& tree, const FeatureTable& table, std::uint64_t seed) {
  EventTimes out;
  auto rng = stream_rng(seed, kTimes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.times.reserve(table.rows.size());
  out.u.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const auto& leaf = tree.nodes[tree.leaf_of(row)];
    out.times.push_back(leaf.distribution.sample(rng));
    double u = 0.0;
    do {
      u = unit(rng);
    } while (!(u > 0.0 && u < 1.0));
    out.u.push_back(u);
  }
  return out;
}

CensoredTimes apply_censoring(std::span<const double> times, std::span<const double> u, double c) {
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("censoring fraction must lie in [0, 1)");
  if (times.size() != u.size()) throw StructuralError("times and u differ in length");
  const std::size_t n = times.size();
  CensoredTimes out;
  out.times.assign(times.begin(), times.end());
  out.events.assign(n, 1);
  if (n == 0) return out;

  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[i] >= 0.0 && u[i] < 1.0)) throw DomainError("u values must lie in [0, 1)");
    ks[i] = times[i] / (1.0 - u[i] * u[i]);
  }
  const auto allowed = static_cast<std::size_t>(std::floor(c * static_cast<double>(n) + 1e-9));
  std::vector<double> sorted = ks;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // At most `allowed` candidates lie strictly above the allowed-th largest.
  out.k = sorted[allowed];
  for (std::size_t i = 0; i < n; ++i) {
    if (out.k < ks[i]) {
      out.times[i] = out.k * (1.0 - u[i] * u[i]);
      out.events[i] = 0;
      ++out.censored;
    }
  }
  return out;
}

GroundTruthTree ground_truth_for(const GenConfig& config) {
  return generate_tree(config.seed, synthetic_schema(config.doubled));
}

SyntheticData generate_sample(const GroundTruthTree& tree, std::size_t n, double c,
                              std::uint64_t seed, int stream) {
  // Distinct base seeds per stream keep train and test draws disjoint.
  const std::uint64_t base = seed * 2 + static_cast<std::uint64_t>(stream);
  const bool doubled = tree.schema.size() > synthetic_schema(false).size();
  SyntheticData data;
  data.features = generate_features(n, base, doubled);
  const auto times = assign_times(tree, data.features, base);
  data.outcome = apply_censoring(times.times, times.u, c);
  return data;
}

CsvTable to_csv(const SyntheticData& data) {
  CsvTable csv;
  csv.header = {"time", "event"};
  for (const auto& f : data.features.schema) csv.header.push_back(f.name);
  csv.rows.reserve(data.features.rows.size());
  for (std::size_t i = 0; i < data.features.rows.size(); ++i) {
    std::vector<std::string> row{format_double(data.outcome.times[i]),
                                 std::to_string(data.outcome.events[i])};
    for (std::size_t c = 0; c < data.features.schema.size(); ++c) {
      const double x = data.features.rows[i][c];
      switch (data.features.schema[c].kind) {
        case RawKind::continuous: row.push_back(format_double(x)); break;
        case RawKind::binary: row.push_back(x == 1.0 ? "1" : "0"); break;
        case RawKind::categorical: row.push_back(std::string(1, static_cast<char>('A' + static_cast<int>(x)))); break;
      }
    }
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

nlohmann::json to_json(const GroundTruthTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"distribution", n.distribution.name()},
                       {"a", n.distribution.a},
                       {"b", n.distribution.b}});
      continue;
    }
    const auto& f = tree.schema[static_cast<std::size_t>(n.feature)];
    nlohmann::json j{{"feature", f.name}, {"left", n.left}, {"right", n.right}};
    if (f.kind == RawKind::continuous) j["threshold"] = n.threshold;
    if (f.kind == RawKind::categorical) {
      std::vector<std::string> levels;
      for (int l = 0; l < f.levels; ++l) {
        if ((n.level_mask >> l) & 1u) levels.emplace_back(1, static_cast<char>('A' + l));
      }
      j["levels"] = levels;
    }
    nodes.push_back(std::move(j));
  }
  return {{"depth", tree.depth()}, {"nodes", nodes}};
}

}  // namespace survtree

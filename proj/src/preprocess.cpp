#include "survtree/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "survtree/error.hpp"

namespace survtree {

namespace {

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "?";
}

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

[[noreturn]] void missing(std::size_t row, const std::string& column) {
  throw DataError("row " + std::to_string(row) + ", column '" + column + "': missing value");
}

const char* kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::binary: return "binary";
    case ColumnKind::categorical: return "categorical";
  }
  return "numeric";
}

ColumnKind kind_from_name(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "binary") return ColumnKind::binary;
  if (s == "categorical") return ColumnKind::categorical;
  throw DataError("unknown column kind '" + s + "'");
}

bool same_value(const std::string& a, const std::string& b) {
  if (a == b) return true;
  const auto x = as_number(a);
  const auto y = as_number(b);
  return x && y && *x == *y;
}

bool evaluate(const Predicate& p, const std::string& cell, std::size_t row,
              const std::vector<ColumnSchema>& columns) {
  if (is_missing(cell)) missing(row, columns[p.column].name);
  switch (p.kind) {
    case PredicateKind::at_most: {
      const auto v = as_number(cell);
      if (!v) {
        throw DataError("row " + std::to_string(row) + ", column '" + columns[p.column].name +
                        "': '" + cell + "' is not numeric");
      }
      return *v <= p.threshold;
    }
    case PredicateKind::equals:
      return cell == p.value;
    case PredicateKind::other:
      return std::find(p.known.begin(), p.known.end(), cell) == p.known.end();
    case PredicateKind::is_true:
      return same_value(cell, p.value);
  }
  return false;
}

// The positive level of a binary column: the larger of its values, numeric
// order when both parse.
std::string positive_level(const std::vector<std::string>& levels) {
  if (levels.size() == 1) return levels[0];
  const auto a = as_number(levels[0]);
  const auto b = as_number(levels[1]);
  if (a && b) return *a > *b ? levels[0] : levels[1];
  return std::max(levels[0], levels[1]);
}

}  // namespace

std::string Predicate::describe(const std::vector<ColumnSchema>& columns) const {
  const std::string& name = columns.at(column).name;
  switch (kind) {
    case PredicateKind::at_most: return name + " <= " + format_double(threshold);
    case PredicateKind::equals: return name + " == " + value;
    case PredicateKind::other: return name + " == <other>";
    case PredicateKind::is_true: return name + " == " + value;
  }
  return name;
}

std::vector<ColumnSchema> infer_schema(const RawTable& table) {
  std::vector<ColumnSchema> schema;
  std::unordered_set<std::string> names;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (!names.insert(table.columns[c]).second) {
      throw DataError("duplicate column name '" + table.columns[c] + "'");
    }
    std::vector<std::string> distinct;
    bool numeric = true;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& cell = table.rows[r][c];
      if (is_missing(cell)) missing(r + 1, table.columns[c]);
      if (numeric && !as_number(cell)) numeric = false;
      if (distinct.size() <= 2 && std::find(distinct.begin(), distinct.end(), cell) == distinct.end()) {
        distinct.push_back(cell);
      }
    }
    ColumnSchema col{table.columns[c], ColumnKind::numeric, {}};
    if (distinct.size() <= 2) {
      col.kind = ColumnKind::binary;
    } else if (!numeric) {
      col.kind = ColumnKind::categorical;
    }
    schema.push_back(std::move(col));
  }
  return schema;
}

std::vector<ColumnSchema> apply_schema_overrides(std::vector<ColumnSchema> schema,
                                                 const nlohmann::json& doc) {
  try {
    for (const auto& entry : doc.at("columns")) {
      const auto name = entry.at("name").get<std::string>();
      auto it = std::find_if(schema.begin(), schema.end(),
                             [&](const ColumnSchema& c) { return c.name == name; });
      if (it == schema.end()) throw DataError("schema names unknown column '" + name + "'");
      it->kind = kind_from_name(entry.at("kind").get<std::string>());
      it->categories.clear();
      if (entry.contains("categories")) {
        it->categories = entry.at("categories").get<std::vector<std::string>>();
        if (it->kind == ColumnKind::categorical && it->categories.empty()) {
          throw DataError("categorical column '" + name + "' has an empty category list");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema JSON: ") + e.what());
  }
  return schema;
}

std::vector<double> quantile_thresholds(std::span<const double> values, int quantiles) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::vector<double> out;
  for (int q = 1; q < quantiles; ++q) {
    const std::size_t b = static_cast<std::size_t>(q) * n / static_cast<std::size_t>(quantiles);
    if (b == 0 || b >= n) continue;
    const double lower = v[b - 1];
    auto next = std::upper_bound(v.begin(), v.end(), lower);
    if (next == v.end()) continue;
    out.push_back(lower + (*next - lower) / 2.0);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BinarizationMap fit_binarizer(const RawTable& table, std::span<const ColumnSchema> schema,
                              const BinarizerConfig& config) {
  if (table.rows.empty()) throw DataError("cannot binarize an empty table");
  if (schema.size() != table.columns.size()) {
    throw DataError("schema and table disagree on the number of columns");
  }
  const std::size_t n = table.rows.size();
  BinarizationMap map;
  map.columns.assign(schema.begin(), schema.end());

  std::vector<Predicate> candidates;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    auto& col = map.columns[c];
    switch (col.kind) {
      case ColumnKind::numeric: {
        std::vector<double> values;
        values.reserve(n);
        for (std::size_t r = 0; r < n; ++r) {
          const auto& cell = table.rows[r][c];
          if (is_missing(cell)) missing(r + 1, col.name);
          const auto v = as_number(cell);
          if (!v) {
            throw DataError("row " + std::to_string(r + 1) + ", column '" + col.name + "': '" +
                            cell + "' is not numeric");
          }
          values.push_back(*v);
        }
        for (double t : quantile_thresholds(values, config.quantiles)) {
          candidates.push_back({c, PredicateKind::at_most, t, {}, {}});
        }
        break;
      }
      case ColumnKind::binary: {
        std::vector<std::string> levels = col.categories;
        if (levels.empty()) {
          for (std::size_t r = 0; r < n; ++r) {
            const auto& cell = table.rows[r][c];
            if (is_missing(cell)) missing(r + 1, col.name);
            if (std::none_of(levels.begin(), levels.end(),
                             [&](const std::string& l) { return same_value(l, cell); })) {
              levels.push_back(cell);
            }
          }
          if (levels.size() > 2) {
            throw DataError("column '" + col.name + "' is declared binary but has " +
                            std::to_string(levels.size()) + " distinct values");
          }
          if (levels.size() == 2 && positive_level(levels) == levels[0]) {
            std::swap(levels[0], levels[1]);
          }
          col.categories = levels;
        }
        candidates.push_back({c, PredicateKind::is_true, 0.0, levels.back(), {}});
        break;
      }
      case ColumnKind::categorical: {
        // Levels in order of first appearance, with counts.
        std::vector<std::string> levels = col.categories;
        std::unordered_map<std::string, std::size_t> position;
        for (std::size_t i = 0; i < levels.size(); ++i) position.emplace(levels[i], i);
        std::vector<std::size_t> counts(levels.size(), 0);
        const bool declared = !levels.empty();
        for (std::size_t r = 0; r < n; ++r) {
          const auto& cell = table.rows[r][c];
          if (is_missing(cell)) missing(r + 1, col.name);
          auto it = position.find(cell);
          if (it == position.end()) {
            if (declared) {
              throw DataError("row " + std::to_string(r + 1) + ", column '" + col.name +
                              "': level '" + cell + "' not in the declared categories");
            }
            it = position.emplace(cell, levels.size()).first;
            levels.push_back(cell);
            counts.push_back(0);
          }
          ++counts[it->second];
        }
        col.categories = levels;
        if (levels.size() <= config.max_categories) {
          for (const auto& l : levels) candidates.push_back({c, PredicateKind::equals, 0.0, l, {}});
        } else {
          std::vector<std::size_t> order(levels.size());
          for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
          std::stable_sort(order.begin(), order.end(),
                           [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
          std::vector<std::string> kept;
          for (std::size_t i = 0; i + 1 < config.max_categories; ++i) {
            kept.push_back(levels[order[i]]);
            candidates.push_back({c, PredicateKind::equals, 0.0, levels[order[i]], {}});
          }
          candidates.push_back({c, PredicateKind::other, 0.0, {}, kept});
        }
        break;
      }
    }
  }

  // Support and duplicate filters on the training truth columns.
  const double min_rows = config.min_support * static_cast<double>(n);
  std::map<std::vector<bool>, std::size_t> seen;
  for (auto& p : candidates) {
    std::vector<bool> column(n);
    std::size_t count = 0;
    for (std::size_t r = 0; r < n; ++r) {
      column[r] = evaluate(p, table.rows[r][p.column], r + 1, map.columns);
      count += column[r] ? 1 : 0;
    }
    const double smaller = static_cast<double>(std::min(count, n - count));
    if (smaller < min_rows || count == 0 || count == n) continue;
    if (!seen.emplace(std::move(column), map.predicates.size()).second) continue;
    map.predicates.push_back(std::move(p));
  }
  if (map.predicates.empty()) {
    throw DataError("degenerate feature space: every candidate predicate was dropped");
  }
  return map;
}

BinarizationMap fit_binarizer(const RawTable& table, const BinarizerConfig& config) {
  const auto schema = infer_schema(table);
  return fit_binarizer(table, schema, config);
}

FeatureVector apply_binarizer(const BinarizationMap& map, std::span<const std::string> row,
                              std::size_t row_number) {
  if (row.size() != map.columns.size()) {
    throw DataError("row " + std::to_string(row_number) + ": expected " +
                    std::to_string(map.columns.size()) + " feature columns");
  }
  FeatureVector fv(map.predicates.size());
  for (std::size_t k = 0; k < map.predicates.size(); ++k) {
    const auto& p = map.predicates[k];
    fv.set(k, evaluate(p, row[p.column], row_number, map.columns));
  }
  return fv;
}

std::vector<FeatureVector> apply_binarizer(const BinarizationMap& map, const RawTable& table) {
  std::vector<std::size_t> source(map.columns.size());
  for (std::size_t c = 0; c < map.columns.size(); ++c) {
    auto it = std::find(table.columns.begin(), table.columns.end(), map.columns[c].name);
    if (it == table.columns.end()) {
      throw DataError("input lacks column '" + map.columns[c].name + "'");
    }
    source[c] = static_cast<std::size_t>(it - table.columns.begin());
  }
  std::vector<FeatureVector> out;
  out.reserve(table.rows.size());
  std::vector<std::string> aligned(map.columns.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < source.size(); ++c) aligned[c] = table.rows[r][source[c]];
    out.push_back(apply_binarizer(map, aligned, r + 1));
  }
  return out;
}

Dataset build_dataset(const BinarizationMap& map, const SurvivalTable& table) {
  auto features = apply_binarizer(map, table.features);
  std::vector<Instance> instances;
  instances.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    instances.push_back({table.times[i], table.events[i] != 0, std::move(features[i])});
  }
  return Dataset(std::move(instances), map.feature_count());
}

nlohmann::json to_json(const BinarizationMap& map) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : map.columns) {
    cols.push_back({{"name", c.name}, {"kind", kind_name(c.kind)}, {"categories", c.categories}});
  }
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : map.predicates) {
    nlohmann::json j{{"column", map.columns[p.column].name}};
    switch (p.kind) {
      case PredicateKind::at_most:
        j["type"] = "le";
        j["threshold"] = p.threshold;
        break;
      case PredicateKind::equals:
        j["type"] = "eq";
        j["value"] = p.value;
        break;
      case PredicateKind::other:
        j["type"] = "other";
        j["known"] = p.known;
        break;
      case PredicateKind::is_true:
        j["type"] = "is";
        j["value"] = p.value;
        break;
    }
    j["label"] = p.describe(map.columns);
    preds.push_back(std::move(j));
  }
  return {{"columns", cols}, {"predicates", preds}};
}

BinarizationMap binarizer_from_json(const nlohmann::json& doc) {
  BinarizationMap map;
  try {
    for (const auto& c : doc.at("columns")) {
      map.columns.push_back({c.at("name").get<std::string>(),
                             kind_from_name(c.at("kind").get<std::string>()),
                             c.value("categories", std::vector<std::string>{})});
    }
    for (const auto& j : doc.at("predicates")) {
      const auto name = j.at("column").get<std::string>();
      auto it = std::find_if(map.columns.begin(), map.columns.end(),
                             [&](const ColumnSchema& c) { return c.name == name; });
      if (it == map.columns.end()) throw DataError("predicate on unknown column '" + name + "'");
      Predicate p;
      p.column = static_cast<std::size_t>(it - map.columns.begin());
      const auto type = j.at("type").get<std::string>();
      if (type == "le") {
        p.kind = PredicateKind::at_most;
        p.threshold = j.at("threshold").get<double>();
      } else if (type == "eq") {
        p.kind = PredicateKind::equals;
        p.value = j.at("value").get<std::string>();
      } else if (type == "other") {
        p.kind = PredicateKind::other;
        p.known = j.at("known").get<std::vector<std::string>>();
      } else if (type == "is") {
        p.kind = PredicateKind::is_true;
        p.value = j.at("value").get<std::string>();
      } else {
        throw DataError("unknown predicate type '" + type + "'");
      }
      map.predicates.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed binarizer JSON: ") + e.what());
  }
  return map;
}

}  // namespace survtree

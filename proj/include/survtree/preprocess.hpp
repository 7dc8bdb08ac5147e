#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "survtree/dataset.hpp"
#include "survtree/feature_vector.hpp"
#include "survtree/io.hpp"

namespace survtree {

enum class ColumnKind { numeric, binary, categorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  // Categorical: the levels. Binary: optional {negative, positive}.
  std::vector<std::string> categories;
};

enum class PredicateKind {
  at_most,  // numeric value <= threshold
  equals,   // categorical level
  other,    // categorical level outside `known`
  is_true,  // binary column at its positive value
};

struct Predicate {
  std::size_t column = 0;
  PredicateKind kind = PredicateKind::at_most;
  double threshold = 0.0;
  std::string value;
  std::vector<std::string> known;

  std::string describe(const std::vector<ColumnSchema>& columns) const;
};

struct BinarizationMap {
  std::vector<ColumnSchema> columns;
  std::vector<Predicate> predicates;

  std::size_t feature_count() const { return predicates.size(); }
};

struct BinarizerConfig {
  int quantiles = 10;
  std::size_t max_categories = 10;
  // Predicates separating fewer than this fraction of rows are dropped.
  double min_support = 0.01;
};

// <= 2 distinct values: binary; any non-numeric value: categorical; else numeric.
std::vector<ColumnSchema> infer_schema(const RawTable& table);

// Replace inferred kinds by those listed in a schema document
// {"columns": [{"name": ..., "kind": ..., "categories": [...]}, ...]}.
std::vector<ColumnSchema> apply_schema_overrides(std::vector<ColumnSchema> schema,
                                                 const nlohmann::json& doc);

// Equal-frequency thresholds: midpoints between the last value of a bucket
// and the next larger observed value.
std::vector<double> quantile_thresholds(std::span<const double> values, int quantiles);

BinarizationMap fit_binarizer(const RawTable& table, std::span<const ColumnSchema> schema,
                              const BinarizerConfig& config = {});
BinarizationMap fit_binarizer(const RawTable& table, const BinarizerConfig& config = {});

// `row` is ordered like map.columns. row_number only labels errors.
FeatureVector apply_binarizer(const BinarizationMap& map, std::span<const std::string> row,
                              std::size_t row_number = 0);
// Columns are matched by name.
std::vector<FeatureVector> apply_binarizer(const BinarizationMap& map, const RawTable& table);

Dataset build_dataset(const BinarizationMap& map, const SurvivalTable& table);

nlohmann::json to_json(const BinarizationMap& map);
BinarizationMap binarizer_from_json(const nlohmann::json& doc);

}  // namespace survtree

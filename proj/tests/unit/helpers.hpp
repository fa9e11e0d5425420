#pragma once

#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adf/dataset.hpp"
#include "adf/rng.hpp"

namespace adf::testing {

/// Schema with `numeric` numeric attributes x0.., optional categorical
/// attributes (given by their category lists) and a trailing class column.
inline SchemaPtr make_schema(std::size_t numeric, std::vector<std::string> classes,
                             std::vector<std::vector<std::string>> categorical = {}) {
  std::vector<Attribute> attrs;
  for (std::size_t i = 0; i < numeric; ++i) attrs.push_back({"x" + std::to_string(i), AttributeKind::Numeric, {}});
  for (std::size_t i = 0; i < categorical.size(); ++i) {
    attrs.push_back({"c" + std::to_string(i), AttributeKind::Categorical, categorical[i]});
  }
  attrs.push_back({"class", AttributeKind::Categorical, std::move(classes)});
  const std::size_t ci = attrs.size() - 1;
  return std::make_shared<const Schema>(std::move(attrs), ci);
}

/// Record with the given feature values (class slot appended as missing).
inline Record rec(std::initializer_list<double> features, std::optional<ClassId> label) {
  Record r;
  r.values.assign(features.begin(), features.end());
  r.values.push_back(kMissing);
  r.label = label;
  return r;
}

inline Batch batch_of(SchemaPtr schema, std::vector<Record> records, std::int64_t id = 1) {
  return Batch{std::move(schema), std::move(records), id, id};
}

/// `n` labelled records on `numeric` attributes uniform in [lo, hi); the
/// label comes from `rule`.
template <typename Rule>
Batch random_batch(SchemaPtr schema, std::size_t n, double lo, double hi, Rng& rng, Rule rule, std::int64_t id = 1) {
  const std::size_t numeric = schema->numeric_indices().size();
  Batch b{schema, {}, id, id};
  std::uniform_real_distribution<double> u(lo, hi);
  for (std::size_t i = 0; i < n; ++i) {
    Record r;
    r.values.assign(schema->attribute_count(), kMissing);
    for (std::size_t j = 0; j < numeric; ++j) r.values[schema->numeric_indices()[j]] = u(rng);
    r.label = rule(r.values);
    b.records.push_back(std::move(r));
  }
  return b;
}

}  // namespace adf::testing

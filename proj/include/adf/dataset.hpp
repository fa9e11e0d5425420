#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adf {

using ClassId = std::uint32_t;
using Count = std::uint64_t;

enum class AttributeKind { Numeric, Categorical };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  /// Observed category texts in first-seen order. The index of a text is its
  /// code inside Record::values. Empty for numeric attributes.
  std::vector<std::string> categories;
};

/// Attribute layout of a stream plus its open-world set of class labels.
///
/// The class column is itself an attribute (categorical); its category list
/// *is* the class-value list. Codes are append-only: extending a schema with
/// new categories or labels never renumbers existing ones, so records encoded
/// against an older schema stay valid against every extension of it.
class Schema {
 public:
  Schema(std::vector<Attribute> attributes, std::size_t class_index);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  std::size_t attribute_count() const { return attributes_.size(); }
  std::size_t class_index() const { return class_index_; }

  const std::vector<std::string>& class_values() const { return attributes_[class_index_].categories; }
  std::size_t class_count() const { return class_values().size(); }
  const std::string& class_name(ClassId id) const { return class_values().at(id); }
  std::optional<ClassId> find_class(std::string_view label) const;

  /// Non-class attribute indices, ascending.
  const std::vector<std::size_t>& feature_indices() const { return features_; }
  /// Numeric non-class attribute indices, ascending.
  const std::vector<std::size_t>& numeric_indices() const { return numeric_; }

  std::optional<std::size_t> find_attribute(std::string_view name) const;
  std::optional<double> find_category(std::size_t attr, std::string_view text) const;

  /// True when `this` has the same attributes and kinds as `base` and every
  /// category/class list of `base` is a prefix of the corresponding list here.
  bool extends(const Schema& base) const;

  Schema with_class(std::string_view label) const;
  Schema with_category(std::size_t attr, std::string_view text) const;

  /// Stable hex digest of names, kinds, categories and class values.
  std::string digest() const;

  /// Text form of a stored value ("" for missing is never produced; callers
  /// supply their missing token).
  std::string format_value(std::size_t attr, double value) const;

 private:
  void rebuild_indices();

  std::vector<Attribute> attributes_;
  std::size_t class_index_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> numeric_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// One row. `values` has one slot per schema attribute: numerics as-is,
/// categoricals as their category code, missing as NaN. The slot at the
/// class index is unused (NaN); the class lives in `label`.
struct Record {
  std::vector<double> values;
  std::optional<ClassId> label;
};

struct Batch {
  SchemaPtr schema;
  std::vector<Record> records;
  std::int64_t batch_id = 0;
  std::int64_t timestamp = 0;

  bool labeled() const;
  std::set<ClassId> class_set() const;
  /// Class label histogram indexed by ClassId (unlabeled records skipped).
  std::vector<Count> class_histogram() const;
};

/// Records of all batches in order, under the schema of the last batch
/// (which must extend every earlier one).
Batch concat(std::span<const Batch> batches, std::int64_t batch_id = 0);

/// Class column selector: by 0-based index or by header name; empty means last column.
using ClassColumn = std::variant<std::monostate, std::size_t, std::string>;

Schema infer_schema(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& sample_rows,
                    const ClassColumn& class_column,
                    std::string_view missing_token = "?");

struct CsvOptions {
  char delimiter = ',';
  std::string missing_token = "?";
  ClassColumn class_column{};
  bool has_header = true;
};

/// Reads a delimited file. With `base` given, rows are encoded against it and
/// unseen categories/labels extend a copy of it; otherwise the schema is
/// inferred from all rows.
Batch load_csv(const std::string& path, const CsvOptions& options = {}, const Schema* base = nullptr);
Batch read_csv(std::istream& in, const CsvOptions& options = {}, const Schema* base = nullptr);

void write_csv(const Batch& batch, std::ostream& out, const CsvOptions& options = {});
void write_csv(const Batch& batch, const std::string& path, const CsvOptions& options = {});

/// Splits one delimited line; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, char delimiter);

enum class Scenario { SKC, MKC, SUC, MUC, MKUC };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);

/// Categorises the class labels of a new batch against the known labels.
Scenario class_scenario(const std::set<ClassId>& new_classes, const std::set<ClassId>& known_classes);

}  // namespace adf

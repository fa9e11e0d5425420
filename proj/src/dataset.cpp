#include "adf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "adf/error.hpp"

namespace adf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // Field separator so ("ab","c") and ("a","bc") differ.
  h ^= 0xff;
  h *= 1099511628211ULL;
  return h;
}

std::size_t resolve_class_column(const std::vector<std::string>& header, const ClassColumn& sel) {
  if (header.empty()) throw ConfigError("cannot resolve class column: no columns");
  if (std::holds_alternative<std::monostate>(sel)) return header.size() - 1;
  if (const auto* idx = std::get_if<std::size_t>(&sel)) {
    if (*idx >= header.size()) {
      throw ConfigError("class column index " + std::to_string(*idx) + " out of range (" +
                        std::to_string(header.size()) + " columns)");
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(sel);
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("class column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Schema::Schema(std::vector<Attribute> attributes, std::size_t class_index)
    : attributes_(std::move(attributes)), class_index_(class_index) {
  if (class_index_ >= attributes_.size()) throw ConfigError("class index out of range");
  std::unordered_set<std::string> names;
  for (const auto& a : attributes_) {
    if (!names.insert(a.name).second) throw DataError("duplicate attribute name '" + a.name + "'");
    if (a.kind == AttributeKind::Numeric && !a.categories.empty()) {
      throw DataError("numeric attribute '" + a.name + "' carries categories");
    }
  }
  attributes_[class_index_].kind = AttributeKind::Categorical;
  rebuild_indices();
}

void Schema::rebuild_indices() {
  features_.clear();
  numeric_.clear();
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (i == class_index_) continue;
    features_.push_back(i);
    if (attributes_[i].kind == AttributeKind::Numeric) numeric_.push_back(i);
  }
}

std::optional<ClassId> Schema::find_class(std::string_view label) const {
  const auto& cv = class_values();
  auto it = std::find(cv.begin(), cv.end(), label);
  if (it == cv.end()) return std::nullopt;
  return static_cast<ClassId>(it - cv.begin());
}

std::optional<std::size_t> Schema::find_attribute(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<double> Schema::find_category(std::size_t attr, std::string_view text) const {
  const auto& cats = attributes_.at(attr).categories;
  auto it = std::find(cats.begin(), cats.end(), text);
  if (it == cats.end()) return std::nullopt;
  return static_cast<double>(it - cats.begin());
}

bool Schema::extends(const Schema& base) const {
  if (attributes_.size() != base.attributes_.size() || class_index_ != base.class_index_) return false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    const auto& b = base.attributes_[i];
    if (a.name != b.name || a.kind != b.kind) return false;
    if (a.categories.size() < b.categories.size()) return false;
    if (!std::equal(b.categories.begin(), b.categories.end(), a.categories.begin())) return false;
  }
  return true;
}

Schema Schema::with_class(std::string_view label) const { return with_category(class_index_, label); }

Schema Schema::with_category(std::size_t attr, std::string_view text) const {
  Schema copy = *this;
  auto& cats = copy.attributes_.at(attr).categories;
  if (copy.attributes_[attr].kind != AttributeKind::Categorical) {
    throw DataError("attribute '" + copy.attributes_[attr].name + "' is numeric");
  }
  if (std::find(cats.begin(), cats.end(), text) == cats.end()) cats.emplace_back(text);
  return copy;
}

std::string Schema::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(h, std::to_string(class_index_));
  for (const auto& a : attributes_) {
    h = fnv1a(h, a.name);
    h = fnv1a(h, a.kind == AttributeKind::Numeric ? "N" : "C");
    for (const auto& c : a.categories) h = fnv1a(h, c);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string Schema::format_value(std::size_t attr, double value) const {
  const auto& a = attributes_.at(attr);
  if (a.kind == AttributeKind::Categorical) return a.categories.at(static_cast<std::size_t>(value));
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

bool Batch::labeled() const {
  return std::all_of(records.begin(), records.end(), [](const Record& r) { return r.label.has_value(); });
}

std::set<ClassId> Batch::class_set() const {
  std::set<ClassId> out;
  for (const auto& r : records) {
    if (r.label) out.insert(*r.label);
  }
  return out;
}

std::vector<Count> Batch::class_histogram() const {
  std::vector<Count> hist(schema ? schema->class_count() : 0, 0);
  for (const auto& r : records) {
    if (!r.label) continue;
    if (*r.label >= hist.size()) hist.resize(*r.label + 1, 0);
    ++hist[*r.label];
  }
  return hist;
}

Batch concat(std::span<const Batch> batches, std::int64_t batch_id) {
  Batch out;
  out.batch_id = batch_id;
  if (batches.empty()) return out;
  out.schema = batches.back().schema;
  std::size_t total = 0;
  for (const auto& b : batches) {
    if (!out.schema->extends(*b.schema)) throw DataError("cannot concatenate batches with incompatible schemas");
    total += b.records.size();
  }
  out.records.reserve(total);
  for (const auto& b : batches) out.records.insert(out.records.end(), b.records.begin(), b.records.end());
  out.timestamp = batches.back().timestamp;
  return out;
}

Schema infer_schema(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& sample_rows,
                    const ClassColumn& class_column, std::string_view missing_token) {
  if (sample_rows.empty()) throw DataError("schema inference needs at least one sample row");
  const std::size_t class_index = resolve_class_column(header, class_column);
  std::vector<Attribute> attrs(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    attrs[j].name = header[j];
    bool numeric = j != class_index;
    for (const auto& row : sample_rows) {
      if (row.size() != header.size()) throw DataError("sample row has wrong column count");
      const auto tok = trim(row[j]);
      if (tok == missing_token) continue;
      if (!parse_real(tok)) {
        numeric = false;
        break;
      }
    }
    attrs[j].kind = numeric ? AttributeKind::Numeric : AttributeKind::Categorical;
    if (!numeric) {
      for (const auto& row : sample_rows) {
        const auto tok = trim(row[j]);
        if (tok == missing_token) continue;
        if (std::find(attrs[j].categories.begin(), attrs[j].categories.end(), tok) == attrs[j].categories.end()) {
          attrs[j].categories.emplace_back(tok);
        }
      }
      if (attrs[j].categories.empty() && j != class_index) {
        throw DataError("categorical attribute '" + header[j] + "' has no observed category");
      }
    }
  }
  return Schema(std::move(attrs), class_index);
}

std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r' && c != '\n') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

Batch read_csv(std::istream& in, const CsvOptions& options, const Schema* base) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, options.delimiter);
    if (header.empty() && options.has_header) {
      for (auto& f : fields) f = std::string(trim(f));
      header = std::move(fields);
      width = header.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw DataError("parse error at line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " columns, got " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (header.empty()) {
    if (base != nullptr) {
      for (const auto& a : base->attributes()) header.push_back(a.name);
    } else {
      for (std::size_t j = 0; j < width; ++j) header.push_back("attr_" + std::to_string(j));
    }
  }
  if (rows.empty()) throw DataError("no data rows");

  Schema schema = base != nullptr ? *base : infer_schema(header, rows, options.class_column, options.missing_token);
  if (schema.attribute_count() != header.size()) {
    throw DataError("column count " + std::to_string(header.size()) + " does not match schema (" +
                    std::to_string(schema.attribute_count()) + ")");
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (schema.attribute(j).name != header[j]) {
      throw DataError("header column '" + header[j] + "' does not match schema attribute '" +
                      schema.attribute(j).name + "'");
    }
  }

  Batch batch;
  batch.records.reserve(rows.size());
  const std::size_t ci = schema.class_index();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Record rec;
    rec.values.assign(header.size(), kMissing);
    for (std::size_t j = 0; j < header.size(); ++j) {
      const auto tok = trim(rows[r][j]);
      if (tok == options.missing_token) continue;
      const auto& attr = schema.attribute(j);
      if (j == ci) {
        auto id = schema.find_class(tok);
        if (!id) {
          schema = schema.with_class(tok);
          id = schema.find_class(tok);
        }
        rec.label = *id;
      } else if (attr.kind == AttributeKind::Numeric) {
        auto v = parse_real(tok);
        if (!v) {
          throw DataError("parse error at data row " + std::to_string(r + 1) + ": '" + std::string(tok) +
                          "' is not numeric for attribute '" + attr.name + "'");
        }
        rec.values[j] = *v;
      } else {
        auto code = schema.find_category(j, tok);
        if (!code) {
          schema = schema.with_category(j, tok);
          code = schema.find_category(j, tok);
        }
        rec.values[j] = *code;
      }
    }
    batch.records.push_back(std::move(rec));
  }
  batch.schema = std::make_shared<const Schema>(std::move(schema));
  return batch;
}

Batch load_csv(const std::string& path, const CsvOptions& options, const Schema* base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, options, base);
}

namespace {

std::string quote_if_needed(const std::string& s, char delimiter) {
  if (s.find(delimiter) == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const Batch& batch, std::ostream& out, const CsvOptions& options) {
  const Schema& schema = *batch.schema;
  const char d = options.delimiter;
  if (options.has_header) {
    for (std::size_t j = 0; j < schema.attribute_count(); ++j) {
      if (j) out << d;
      out << quote_if_needed(schema.attribute(j).name, d);
    }
    out << '\n';
  }
  for (const auto& rec : batch.records) {
    for (std::size_t j = 0; j < schema.attribute_count(); ++j) {
      if (j) out << d;
      if (j == schema.class_index()) {
        out << (rec.label ? quote_if_needed(schema.class_name(*rec.label), d) : options.missing_token);
      } else if (is_missing(rec.values[j])) {
        out << options.missing_token;
      } else {
        out << quote_if_needed(schema.format_value(j, rec.values[j]), d);
      }
    }
    out << '\n';
  }
}

void write_csv(const Batch& batch, const std::string& path, const CsvOptions& options) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(batch, out, options);
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::SKC: return "SKC";
    case Scenario::MKC: return "MKC";
    case Scenario::SUC: return "SUC";
    case Scenario::MUC: return "MUC";
    case Scenario::MKUC: return "MKUC";
  }
  return "?";
}

Scenario scenario_from_string(std::string_view s) {
  for (auto sc : {Scenario::SKC, Scenario::MKC, Scenario::SUC, Scenario::MUC, Scenario::MKUC}) {
    if (to_string(sc) == s) return sc;
  }
  throw DataError("unknown scenario '" + std::string(s) + "'");
}

Scenario class_scenario(const std::set<ClassId>& new_classes, const std::set<ClassId>& known_classes) {
  if (new_classes.empty()) throw InvalidInput("class_scenario: new class set is empty");
  std::size_t known = 0;
  for (ClassId c : new_classes) known += known_classes.count(c);
  const bool single = new_classes.size() == 1;
  if (known == new_classes.size()) return single ? Scenario::SKC : Scenario::MKC;
  if (known == 0) return single ? Scenario::SUC : Scenario::MUC;
  return Scenario::MKUC;
}

}  // namespace adf

#include "adf/streamgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_set>

#include "adf/error.hpp"
#include "adf/rng.hpp"
#include "adf/tree.hpp"

namespace adf {

namespace {

constexpr std::size_t kNumeric = 7;
constexpr std::size_t kClassIndex = 10;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Rank r (1-based) is class id r-1. Odd ranks form the low-x0 group.
bool low_region_class(ClassId c) { return c % 2 == 0; }

ClassId house_rule(const std::vector<double>& v) {
  if (v[0] < 57.0) {
    if (v[1] < 38.6) return 0;
    if (v[1] < 66.7) return 2;
    return v[2] < 63.2 ? 4 : 6;
  }
  if (v[7] == 0.0) return 1;  // c0 == red
  return v[3] < 58.3 ? 3 : 5;
}

}  // namespace

SchemaPtr house_schema() {
  static const SchemaPtr schema = [] {
    std::vector<Attribute> attrs;
    for (std::size_t i = 0; i < kNumeric; ++i) attrs.push_back({"x" + std::to_string(i), AttributeKind::Numeric, {}});
    attrs.push_back({"c0", AttributeKind::Categorical, {"red", "green", "blue"}});
    attrs.push_back({"c1", AttributeKind::Categorical, {"a", "b", "c", "d"}});
    attrs.push_back({"c2", AttributeKind::Categorical, {"low", "mid", "high"}});
    Attribute cls{"class", AttributeKind::Categorical, {}};
    for (int r = 1; r <= 7; ++r) cls.categories.push_back("class_" + std::to_string(r));
    attrs.push_back(std::move(cls));
    return std::make_shared<const Schema>(std::move(attrs), kClassIndex);
  }();
  return schema;
}

std::vector<Record> generate_house_records(const Schema& schema, std::size_t n, std::uint64_t seed,
                                           const HouseOptions& options) {
  if (schema.attribute_count() != kClassIndex + 1 || schema.class_count() < 7) {
    throw InvalidInput("schema is not a House schema");
  }
  if (options.label_noise < 0.0 || options.label_noise > 1.0) throw ConfigError("label noise must lie in [0, 1]");
  if (!options.relabel.empty() && options.relabel.size() != 7) throw ConfigError("relabelling must map all 7 classes");
  Rng rng = make_rng(seed, "house");
  std::discrete_distribution<int> c0_dist({0.44, 0.33, 0.23});
  std::vector<Record> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record r;
    r.values.assign(kClassIndex + 1, kMissing);
    for (std::size_t j = 0; j < kNumeric; ++j) r.values[j] = uniform(rng, 0.0, 100.0);
    r.values[7] = c0_dist(rng);
    r.values[8] = static_cast<double>(uniform_index(rng, 4));
    r.values[9] = static_cast<double>(uniform_index(rng, 3));
    ClassId label = house_rule(r.values);
    if (uniform(rng, 0.0, 1.0) < options.label_noise) {
      std::vector<ClassId> group;
      for (ClassId c = 0; c < 7; ++c) {
        if (c != label && low_region_class(c) == low_region_class(label)) group.push_back(c);
      }
      label = group[uniform_index(rng, group.size())];
    }
    if (!options.relabel.empty()) label = options.relabel[label];
    r.label = label;
    out.push_back(std::move(r));
  }
  return out;
}

Batch generate_house_dataset(std::size_t n, std::uint64_t seed, const HouseOptions& options) {
  if (n < 100) throw InvalidInput("House dataset needs at least 100 records");
  Batch b;
  b.schema = house_schema();
  b.records = generate_house_records(*b.schema, n, seed, options);
  return b;
}

std::string dataset_digest(const Batch& dataset) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::string sd = dataset.schema->digest();
  mix(sd.data(), sd.size());
  for (const auto& r : dataset.records) {
    for (double v : r.values) {
      std::uint64_t bits = 0;
      if (!is_missing(v)) std::memcpy(&bits, &v, sizeof bits);
      else bits = 0x7ff8000000000001ULL;
      mix(&bits, sizeof bits);
    }
    const std::uint64_t label = r.label ? *r.label : ~0ULL;
    mix(&label, sizeof label);
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

// ---------------------------------------------------------------------------
// Batch simulation

namespace {

enum class Source { Leaves, Halves, SingleClass };

struct Block {
  std::string label;
  Scenario scenario;
  std::size_t count;
  Source source;
  std::size_t half = 0;      // Leaves / SingleClass
  double share = 0.0;        // Leaves: top-two share; Halves: first-half share
};

const std::vector<Block>& standard_schedule() {
  static const std::vector<Block> s{
      {"MKC-1", Scenario::MKC, 4, Source::Leaves, 0, 0.25},   {"MKC-2", Scenario::MKC, 4, Source::Leaves, 0, 0.75},
      {"SKC", Scenario::SKC, 3, Source::SingleClass, 0, 0.0}, {"SUC", Scenario::SUC, 3, Source::SingleClass, 1, 0.0},
      {"MUC-1", Scenario::MUC, 4, Source::Leaves, 1, 0.25},   {"MUC-2", Scenario::MUC, 4, Source::Leaves, 1, 0.75},
      {"MKUC-1", Scenario::MKUC, 4, Source::Halves, 0, 0.75}, {"MKUC-2", Scenario::MKUC, 4, Source::Halves, 0, 0.25},
      {"MKUC-3", Scenario::MKUC, 4, Source::Halves, 0, 0.50},
  };
  return s;
}

const std::vector<Block>& rearranged_schedule() {
  static const std::vector<Block> s = [] {
    std::map<std::string, Block> by_label;
    for (const auto& b : standard_schedule()) by_label.emplace(b.label, b);
    std::vector<Block> out;
    for (const char* l : {"MKC-1", "MKC-2", "MKUC-1", "MKUC-2", "MUC-1", "MUC-2", "MKUC-3"}) {
      Block b = by_label.at(l);
      b.count = 4;
      out.push_back(b);
    }
    return out;
  }();
  return s;
}

struct Halves {
  std::vector<ClassId> half[2];  // each ordered by descending frequency
};

Halves split_classes(const Batch& dataset) {
  const auto hist = dataset.class_histogram();
  std::vector<ClassId> present;
  for (ClassId c = 0; c < hist.size(); ++c) {
    if (hist[c] > 0) present.push_back(c);
  }
  if (present.size() < 6) {
    throw DataError("unsupported dataset: " + std::to_string(present.size()) +
                    " class labels present, batch simulation needs at least 6");
  }
  std::stable_sort(present.begin(), present.end(), [&](ClassId a, ClassId b) { return hist[a] > hist[b]; });
  Halves h;
  for (std::size_t i = 0; i < present.size(); ++i) h.half[i % 2].push_back(present[i]);
  return h;
}

Halves halves_from_manifest(const Batch& dataset, const StreamManifest& m) {
  Halves h;
  const std::vector<std::string>* names[2] = {&m.first_half, &m.second_half};
  for (int k = 0; k < 2; ++k) {
    for (const auto& name : *names[k]) {
      const auto id = dataset.schema->find_class(name);
      if (!id) throw DataError("manifest class '" + name + "' is not in the dataset");
      h.half[k].push_back(*id);
    }
  }
  return h;
}

// A shuffled candidate list consumed front to back; rows taken elsewhere are skipped.
struct Pool {
  std::vector<std::size_t> rows;
  std::size_t cursor = 0;
};

class Drawer {
 public:
  Drawer(const Batch& dataset, const Halves& halves, std::uint64_t seed, std::size_t guide_depth)
      : used_(dataset.records.size(), false), rng_(make_rng(seed, "simulation")) {
    std::vector<int> half_of(dataset.schema->class_count(), -1);
    for (int k = 0; k < 2; ++k) {
      for (ClassId c : halves.half[k]) half_of[c] = k;
    }
    for (int k = 0; k < 2; ++k) {
      Batch part{dataset.schema, {}, 0, 0};
      std::vector<std::size_t> index;
      for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& r = dataset.records[i];
        if (r.label && half_of[*r.label] == k) {
          part.records.push_back(r);
          index.push_back(i);
        }
      }
      InductionParams guide;
      guide.max_depth = guide_depth;
      guide.seed = derive_seed(seed, "guide", static_cast<std::uint64_t>(k));
      const Forest f = build_forest(part, 1, ForestMode::SysForStyle, guide);
      const DecisionTree& t = f.trees.front();
      std::vector<LeafId> leaf_of(part.records.size());
      std::vector<Count> support(t.next_leaf_id(), 0);
      for (std::size_t i = 0; i < part.records.size(); ++i) {
        leaf_of[i] = t.route(part.records[i]);
        ++support[leaf_of[i]];
      }
      std::vector<LeafId> ids = t.leaf_ids();
      std::stable_sort(ids.begin(), ids.end(), [&](LeafId a, LeafId b) {
        return support[a] != support[b] ? support[a] > support[b] : a < b;
      });
      std::vector<bool> top(t.next_leaf_id(), false);
      for (std::size_t j = 0; j < std::min<std::size_t>(2, ids.size()); ++j) top[ids[j]] = true;
      for (std::size_t i = 0; i < part.records.size(); ++i) {
        (top[leaf_of[i]] ? top_[k] : rest_[k]).rows.push_back(index[i]);
        all_[k].rows.push_back(index[i]);
      }
      for (Pool* p : {&top_[k], &rest_[k], &all_[k]}) std::shuffle(p->rows.begin(), p->rows.end(), rng_);
    }
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
      const auto& r = dataset.records[i];
      if (r.label) by_class_[*r.label].rows.push_back(i);
    }
    for (auto& [c, p] : by_class_) std::shuffle(p.rows.begin(), p.rows.end(), rng_);
  }

  /// Rows for `count` records of `block`, avoiding rows already in `batch_rows`.
  std::vector<std::size_t> draw(const Block& block, std::size_t ordinal, const Halves& halves, std::size_t count,
                                std::unordered_set<std::size_t>& batch_rows, bool& resampled, std::int64_t batch_id) {
    std::vector<std::size_t> out;
    auto take = [&](Pool& pool, std::size_t k, const char* what) {
      if (k == 0) return;
      if (pool.rows.empty()) {
        throw DataError("quota for batch " + std::to_string(batch_id) + " (" + block.label + ") cannot be met: no " +
                        what + " rows");
      }
      while (k > 0 && pool.cursor < pool.rows.size()) {
        const std::size_t row = pool.rows[pool.cursor++];
        if (used_[row]) continue;
        used_[row] = true;
        batch_rows.insert(row);
        out.push_back(row);
        --k;
      }
      if (k == 0) return;
      // Exhausted: reuse earlier rows, but never twice within one batch.
      std::vector<std::size_t> spare;
      for (std::size_t row : pool.rows) {
        if (!batch_rows.count(row)) spare.push_back(row);
      }
      if (spare.size() < k) {
        throw DataError("quota for batch " + std::to_string(batch_id) + " (" + block.label + ") cannot be met: only " +
                        std::to_string(spare.size()) + " " + what + " rows left");
      }
      resampled = true;
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(spare[j], spare[j + uniform_index(rng_, spare.size() - j)]);
        batch_rows.insert(spare[j]);
        out.push_back(spare[j]);
      }
    };
    switch (block.source) {
      case Source::Leaves: {
        const auto n_top = static_cast<std::size_t>(std::llround(block.share * static_cast<double>(count)));
        take(top_[block.half], n_top, "largest-leaf");
        take(rest_[block.half], count - n_top, "remaining-leaf");
        break;
      }
      case Source::Halves: {
        const auto n_first = static_cast<std::size_t>(std::llround(block.share * static_cast<double>(count)));
        take(all_[0], n_first, "first-half");
        take(all_[1], count - n_first, "second-half");
        break;
      }
      case Source::SingleClass: {
        const auto& classes = halves.half[block.half];
        take(by_class_[classes[ordinal % classes.size()]], count, "single-class");
        break;
      }
    }
    return out;
  }

  Rng& rng() { return rng_; }

 private:
  std::vector<bool> used_;
  Rng rng_;
  Pool top_[2], rest_[2], all_[2];
  std::map<ClassId, Pool> by_class_;
};

StreamManifest run_schedule(const Batch& dataset, const Halves& halves, const std::vector<Block>& schedule,
                            std::uint64_t seed, std::size_t train_size, std::size_t guide_depth) {
  if (train_size < 8) throw ConfigError("batch training size must be at least 8");
  const std::size_t share = train_size / 8;  // 10% of a batch whose test part is 20%
  Drawer drawer(dataset, halves, seed, guide_depth);

  StreamManifest m;
  m.seed = seed;
  m.dataset_digest = dataset_digest(dataset);
  m.train_size = train_size;
  for (int k = 0; k < 2; ++k) {
    for (ClassId c : halves.half[k]) (k == 0 ? m.first_half : m.second_half).push_back(dataset.schema->class_name(c));
  }

  std::vector<std::vector<std::size_t>> reserve;
  std::int64_t batch_id = 0;
  for (const Block& block : schedule) {
    for (std::size_t ordinal = 0; ordinal < block.count; ++ordinal) {
      ManifestEntry e;
      e.batch_id = ++batch_id;
      e.label = block.label;
      e.scenario = block.scenario;
      std::unordered_set<std::size_t> rows;
      e.train_rows = drawer.draw(block, ordinal, halves, train_size, rows, e.resampled, e.batch_id);
      e.test_rows = drawer.draw(block, ordinal, halves, share, rows, e.resampled, e.batch_id);
      reserve.push_back(drawer.draw(block, ordinal, halves, 2 * share, rows, e.resampled, e.batch_id));

      // The other half of the test set comes from rows set aside by the two
      // previous batches (by this batch itself when it is the first).
      const std::size_t b = reserve.size() - 1;
      std::vector<std::pair<std::size_t, std::size_t>> candidates;  // (reserve list, position)
      for (std::size_t back = b == 0 ? 0 : 1; back <= 2 && back <= b; ++back) {
        for (std::size_t pos = 0; pos < reserve[b - back].size(); ++pos) candidates.emplace_back(b - back, pos);
      }
      const std::size_t k = std::min(share, candidates.size());
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(candidates[j], candidates[j + uniform_index(drawer.rng(), candidates.size() - j)]);
      }
      std::vector<std::pair<std::size_t, std::size_t>> chosen(candidates.begin(), candidates.begin() + k);
      std::sort(chosen.begin(), chosen.end(), std::greater<>());  // erase back to front
      for (const auto& [list, pos] : chosen) {
        e.test_rows.push_back(reserve[list][pos]);
        reserve[list].erase(reserve[list].begin() + static_cast<std::ptrdiff_t>(pos));
      }
      m.entries.push_back(std::move(e));
    }
  }
  return m;
}

std::size_t resolve_train_size(const Batch& dataset, const SimulationOptions& o) {
  if (o.train_size > 0) return o.train_size;
  return std::max<std::size_t>(40, static_cast<std::size_t>(std::llround(0.015 * static_cast<double>(dataset.records.size()))));
}

}  // namespace

StreamManifest simulate_batches(const Batch& dataset, std::uint64_t seed, const SimulationOptions& options) {
  if (!dataset.labeled()) throw DataError("batch simulation needs a fully labelled dataset");
  const Halves halves = split_classes(dataset);
  return run_schedule(dataset, halves, standard_schedule(), seed, resolve_train_size(dataset, options),
                      options.guide_depth);
}

StreamManifest rearrange_scenarios(const Batch& dataset, const StreamManifest& manifest, std::uint64_t seed,
                                   const SimulationOptions& options) {
  if (manifest.dataset_digest != dataset_digest(dataset)) throw DataError("manifest was made from another dataset");
  const Halves halves = halves_from_manifest(dataset, manifest);
  StreamManifest m = run_schedule(dataset, halves, rearranged_schedule(), seed, manifest.train_size, options.guide_depth);
  m.rearranged = true;
  return m;
}

std::vector<BatchPair> materialize(const Batch& dataset, const StreamManifest& manifest) {
  if (manifest.dataset_digest != dataset_digest(dataset)) {
    throw DataError("manifest digest " + manifest.dataset_digest + " does not match the dataset");
  }
  auto pick = [&](const std::vector<std::size_t>& rows, std::int64_t id) {
    Batch b{dataset.schema, {}, id, id};
    b.records.reserve(rows.size());
    for (std::size_t r : rows) {
      if (r >= dataset.records.size()) throw DataError("manifest row " + std::to_string(r) + " is out of range");
      b.records.push_back(dataset.records[r]);
    }
    return b;
  };
  std::vector<BatchPair> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    out.push_back({pick(e.train_rows, e.batch_id), pick(e.test_rows, e.batch_id), e.label, e.scenario});
  }
  return out;
}

Json to_json(const StreamManifest& m) {
  Json batches = Json::array();
  for (const auto& e : m.entries) {
    Json je;
    je["batch_id"] = e.batch_id;
    je["label"] = e.label;
    je["scenario"] = to_string(e.scenario);
    je["resampled"] = e.resampled;
    je["train_rows"] = e.train_rows;
    je["test_rows"] = e.test_rows;
    batches.push_back(std::move(je));
  }
  Json j;
  j["format"] = "adf-manifest";
  j["seed"] = m.seed;
  j["dataset_digest"] = m.dataset_digest;
  j["train_size"] = m.train_size;
  j["rearranged"] = m.rearranged;
  j["first_half"] = m.first_half;
  j["second_half"] = m.second_half;
  j["batches"] = std::move(batches);
  return j;
}

StreamManifest manifest_from_json(const Json& j) {
  try {
    if (j.value("format", "") != "adf-manifest") throw DataError("not a manifest document");
    StreamManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.dataset_digest = j.at("dataset_digest").get<std::string>();
    m.train_size = j.at("train_size").get<std::size_t>();
    m.rearranged = j.at("rearranged").get<bool>();
    m.first_half = j.at("first_half").get<std::vector<std::string>>();
    m.second_half = j.at("second_half").get<std::vector<std::string>>();
    for (const auto& je : j.at("batches")) {
      ManifestEntry e;
      e.batch_id = je.at("batch_id").get<std::int64_t>();
      e.label = je.at("label").get<std::string>();
      e.scenario = scenario_from_string(je.at("scenario").get<std::string>());
      e.resampled = je.at("resampled").get<bool>();
      e.train_rows = je.at("train_rows").get<std::vector<std::size_t>>();
      e.test_rows = je.at("test_rows").get<std::vector<std::size_t>>();
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

std::vector<BatchPair> drift_stream(std::uint64_t seed, const DriftOptions& options) {
  if (options.train_size < 4) throw ConfigError("drift batches need at least 4 training records");
  const SchemaPtr schema = house_schema();
  std::vector<ClassId> perm(7);
  Rng rng = make_rng(seed, "drift-relabel");
  bool fixed_point = true;
  while (fixed_point) {
    for (ClassId c = 0; c < 7; ++c) perm[c] = c;
    std::shuffle(perm.begin(), perm.end(), rng);
    fixed_point = false;
    for (ClassId c = 0; c < 7; ++c) fixed_point = fixed_point || perm[c] == c;
  }
  const std::size_t test_size = std::max<std::size_t>(1, options.train_size / 4);
  std::vector<BatchPair> out;
  for (std::size_t b = 1; b <= options.batches; ++b) {
    HouseOptions ho;
    ho.label_noise = options.label_noise;
    const bool shifted = options.shift_batch > 0 && b >= options.shift_batch;
    if (shifted) ho.relabel = perm;
    auto records = generate_house_records(*schema, options.train_size + test_size, derive_seed(seed, "drift", b), ho);
    const auto id = static_cast<std::int64_t>(b);
    BatchPair p;
    p.train = Batch{schema, {records.begin(), records.begin() + static_cast<std::ptrdiff_t>(options.train_size)}, id, id};
    p.test = Batch{schema, {records.begin() + static_cast<std::ptrdiff_t>(options.train_size), records.end()}, id, id};
    p.label = shifted ? "shifted" : "stationary";
    p.scenario = Scenario::MKC;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace adf

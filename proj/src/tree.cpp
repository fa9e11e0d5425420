#include "adf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "adf/error.hpp"

namespace adf {

RecordRefs refs_of(std::span<const Record> records) {
  RecordRefs out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(&r);
  return out;
}

double entropy(std::span<const Count> class_counts) {
  Count total = 0;
  for (Count c : class_counts) total += c;
  if (total == 0) throw InvalidInput("entropy of an empty class histogram");
  double h = 0.0;
  for (Count c : class_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

// c*log2(c) and log2(c) for small integer c, grown on demand. Same values as
// calling log2 directly, so split choices do not depend on the cache.
struct LogTable {
  std::vector<double> xlogx{0.0, 0.0}, logx{0.0, 0.0};
  void reserve(Count n) {
    for (std::size_t c = xlogx.size(); c <= n; ++c) {
      const double l = std::log2(static_cast<double>(c));
      logx.push_back(l);
      xlogx.push_back(static_cast<double>(c) * l);
    }
  }
};

LogTable& log_table(Count n) {
  thread_local LogTable t;
  t.reserve(n);
  return t;
}

// Sum over classes of c*log2(c); entropy = log2(n) - plogp / n.
double plogp_sum(const std::vector<Count>& counts, const LogTable& t) {
  double s = 0.0;
  for (Count c : counts) {
    if (c > 1) s += t.xlogx[c];
  }
  return s;
}

double entropy_from(double plogp, Count n, const LogTable& t) {
  if (n == 0) return 0.0;
  const double dn = static_cast<double>(n);
  return std::max(0.0, t.logx[n] - plogp / dn);
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? std::max(mid, lo) : lo;
}

struct Best {
  std::optional<SplitCandidate> cand;
  void offer(const SplitTest& t, double gain) {
    if (!cand || gain > cand->gain + kGainTolerance) cand = SplitCandidate{t, gain};
  }
};

}  // namespace

std::optional<SplitCandidate> best_entropy_split(std::span<const Record* const> records, const Schema& schema,
                                                 std::span<const std::size_t> candidate_attrs,
                                                 std::size_t min_leaf_size) {
  const std::size_t n = records.size();
  const std::size_t min_leaf = std::max<std::size_t>(min_leaf_size, 1);
  if (n < 2 * min_leaf) return std::nullopt;
  std::size_t classes = schema.class_count();
  for (const Record* r : records) {
    if (r->label) classes = std::max<std::size_t>(classes, *r->label + 1);
  }

  std::vector<std::size_t> attrs(candidate_attrs.begin(), candidate_attrs.end());
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());

  const LogTable& lt = log_table(n);
  Best best;
  std::vector<std::pair<double, ClassId>> known;
  known.reserve(n);
  std::vector<Count> total(classes), left(classes), right(classes);

  for (std::size_t attr : attrs) {
    known.clear();
    for (const Record* r : records) {
      const double v = r->values[attr];
      if (!is_missing(v) && r->label) known.emplace_back(v, *r->label);
    }
    const std::size_t k = known.size();
    if (k < 2 * min_leaf) continue;
    std::fill(total.begin(), total.end(), 0);
    for (const auto& [v, c] : known) ++total[c];
    const double parent = entropy_from(plogp_sum(total, lt), k, lt);
    if (parent <= 0.0) continue;
    const double known_fraction = static_cast<double>(k) / static_cast<double>(n);
    const double dk = static_cast<double>(k);

    if (schema.attribute(attr).kind == AttributeKind::Numeric) {
      std::sort(known.begin(), known.end());
      std::fill(left.begin(), left.end(), 0);
      right = total;
      for (std::size_t i = 0; i + 1 < k; ++i) {
        const ClassId c = known[i].second;
        ++left[c];
        --right[c];
        const std::size_t nl = i + 1;
        const std::size_t nr = k - nl;
        if (known[i].first == known[i + 1].first) continue;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double child = (static_cast<double>(nl) / dk) * entropy_from(plogp_sum(left, lt), nl, lt) +
                             (static_cast<double>(nr) / dk) * entropy_from(plogp_sum(right, lt), nr, lt);
        best.offer(SplitTest::threshold(attr, midpoint(known[i].first, known[i + 1].first)),
                   known_fraction * (parent - child));
      }
    } else {
      const std::size_t cats = schema.attribute(attr).categories.size();
      std::size_t max_code = cats;
      for (const auto& [v, c] : known) max_code = std::max(max_code, static_cast<std::size_t>(v) + 1);
      std::vector<std::vector<Count>> per_cat(max_code, std::vector<Count>(classes, 0));
      std::vector<std::size_t> cat_size(max_code, 0);
      for (const auto& [v, c] : known) {
        ++per_cat[static_cast<std::size_t>(v)][c];
        ++cat_size[static_cast<std::size_t>(v)];
      }
      for (std::size_t code = 0; code < max_code; ++code) {
        const std::size_t nl = cat_size[code];
        const std::size_t nr = k - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        for (std::size_t c = 0; c < classes; ++c) right[c] = total[c] - per_cat[code][c];
        const double child = (static_cast<double>(nl) / dk) * entropy_from(plogp_sum(per_cat[code], lt), nl, lt) +
                             (static_cast<double>(nr) / dk) * entropy_from(plogp_sum(right, lt), nr, lt);
        best.offer(SplitTest::equals(attr, static_cast<double>(code)), known_fraction * (parent - child));
      }
    }
  }
  if (!best.cand || best.cand->gain <= kGainTolerance) return std::nullopt;
  return best.cand;
}

ClassId majority_of(std::span<const Count> counts, ClassId fallback) {
  Count best = 0;
  ClassId arg = fallback;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > best) {
      best = counts[c];
      arg = static_cast<ClassId>(c);
    }
  }
  return arg;
}

// ---------------------------------------------------------------------------
// DecisionTree

DecisionTree DecisionTree::leaf(std::vector<Count> class_counts, ClassId fallback_majority) {
  DecisionTree t;
  Node n;
  n.leaf_id = t.allocate_leaf_id();
  n.majority = majority_of(class_counts, fallback_majority);
  n.class_counts = std::move(class_counts);
  t.root_ = t.add_node(std::move(n));
  t.finalize();
  return t;
}

std::int32_t DecisionTree::route_node(const Record& r) const {
  std::int32_t i = root_;
  while (true) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return i;
    const double v = r.values[n.test.attr];
    bool left;
    if (is_missing(v)) {
      left = node(n.left).train_size >= node(n.right).train_size;
    } else {
      left = n.test.goes_left(v);
    }
    i = left ? n.left : n.right;
  }
}

std::vector<LeafId> DecisionTree::leaf_ids() const {
  std::vector<LeafId> out;
  // nodes_ is in preorder after finalize()
  for (const auto& n : nodes_) {
    if (n.is_leaf()) out.push_back(n.leaf_id);
  }
  return out;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const Node& n = node(i);
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

std::size_t DecisionTree::depth_of(std::int32_t node_index) const {
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    if (i == node_index) return d;
    const Node& n = node(i);
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  throw InvariantError("node not reachable from root");
}

bool DecisionTree::has_leaf(LeafId id) const {
  return id < leaf_index_.size() && leaf_index_[id] != Node::kNone;
}

std::int32_t DecisionTree::leaf_node(LeafId id) const {
  if (!has_leaf(id)) throw InvariantError("unknown leaf id " + std::to_string(id));
  return leaf_index_[id];
}

const Node& DecisionTree::leaf(LeafId id) const { return node(leaf_node(id)); }
Node& DecisionTree::leaf(LeafId id) { return node(leaf_node(id)); }

void DecisionTree::absorb_bounds(const Aabb& b) { bounds_ = bounds_ ? bounds_->united(b) : b; }

std::int32_t DecisionTree::add_node(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void DecisionTree::finalize() {
  std::vector<Node> ordered;
  ordered.reserve(nodes_.size());
  std::vector<std::int32_t> remap(nodes_.size(), Node::kNone);
  std::vector<std::int32_t> stack{root_};
  while (!stack.empty()) {
    const std::int32_t i = stack.back();
    stack.pop_back();
    remap[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(ordered.size());
    ordered.push_back(std::move(nodes_[static_cast<std::size_t>(i)]));
    const Node& n = ordered.back();
    if (!n.is_leaf()) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  for (auto& n : ordered) {
    if (n.is_leaf()) {
      n.test = SplitTest{};
      continue;
    }
    n.left = remap[static_cast<std::size_t>(n.left)];
    n.right = remap[static_cast<std::size_t>(n.right)];
    n.class_counts.clear();
    n.leaf_id = 0;
    n.majority = 0;
  }
  // Children follow their parent in preorder, so a reverse sweep sees them first.
  for (std::size_t k = ordered.size(); k-- > 0;) {
    Node& n = ordered[k];
    if (n.is_leaf()) {
      n.train_size = std::accumulate(n.class_counts.begin(), n.class_counts.end(), Count{0});
    } else {
      n.train_size = ordered[static_cast<std::size_t>(n.left)].train_size +
                     ordered[static_cast<std::size_t>(n.right)].train_size;
    }
  }
  nodes_ = std::move(ordered);
  root_ = 0;
  leaf_index_.assign(next_leaf_id_, Node::kNone);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& n = nodes_[k];
    if (!n.is_leaf()) continue;
    if (n.leaf_id >= next_leaf_id_ || leaf_index_[n.leaf_id] != Node::kNone) {
      throw InvariantError("leaf ids are not unique within a tree");
    }
    leaf_index_[n.leaf_id] = static_cast<std::int32_t>(k);
  }
}

DecisionTree DecisionTree::from_parts(std::vector<Node> nodes, LeafId next_leaf_id, std::optional<Aabb> bounds) {
  if (nodes.empty()) throw DataError("tree has no nodes");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& n = nodes[k];
    if ((n.left == Node::kNone) != (n.right == Node::kNone)) throw DataError("node with a single child");
    if (n.is_leaf()) continue;
    const auto sz = static_cast<std::int32_t>(nodes.size());
    if (n.left <= static_cast<std::int32_t>(k) || n.right <= static_cast<std::int32_t>(k) || n.left >= sz ||
        n.right >= sz) {
      throw DataError("node child index out of preorder range");
    }
  }
  DecisionTree t;
  t.nodes_ = std::move(nodes);
  t.root_ = 0;
  t.next_leaf_id_ = next_leaf_id;
  t.bounds_ = std::move(bounds);
  t.finalize();
  return t;
}

// ---------------------------------------------------------------------------
// Induction

std::string_view to_string(ForestMode m) { return m == ForestMode::RfStyle ? "rf" : "sysfor"; }

ForestMode forest_mode_from_string(std::string_view s) {
  if (s == "rf" || s == "RfStyle") return ForestMode::RfStyle;
  if (s == "sysfor" || s == "SysForStyle") return ForestMode::SysForStyle;
  throw ConfigError("unknown forest mode '" + std::string(s) + "' (expected rf or sysfor)");
}

AttrSampler::AttrSampler(const Schema& schema)
    : features_(schema.feature_indices()), per_split_(features_.size()), rng_(0) {}

AttrSampler::AttrSampler(const Schema& schema, std::size_t per_split, Rng rng)
    : features_(schema.feature_indices()), per_split_(per_split), rng_(std::move(rng)) {}

std::vector<std::size_t> AttrSampler::next() {
  if (per_split_ >= features_.size()) return features_;
  // partial Fisher-Yates
  std::vector<std::size_t> pool = features_;
  for (std::size_t i = 0; i < per_split_; ++i) {
    const std::size_t j = i + uniform_index(rng_, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(per_split_);
  std::sort(pool.begin(), pool.end());
  return pool;
}

namespace {

std::vector<Count> histogram(const RecordRefs& records, std::size_t classes) {
  std::vector<Count> h(classes, 0);
  for (const Record* r : records) {
    if (!r->label) continue;
    if (*r->label >= h.size()) h.resize(*r->label + 1, 0);
    ++h[*r->label];
  }
  return h;
}

bool is_pure(const std::vector<Count>& h) {
  return std::count_if(h.begin(), h.end(), [](Count c) { return c > 0; }) <= 1;
}

}  // namespace

void grow_leaf(DecisionTree& tree, std::int32_t node_index, RecordRefs records, const Schema& schema,
               const InductionParams& params, AttrSampler& sampler, std::size_t depth_budget,
               std::optional<SplitTest> forced_root) {
  struct Work {
    std::int32_t node;
    RecordRefs records;
    std::size_t depth;
  };
  std::vector<Work> stack;
  stack.push_back({node_index, std::move(records), 0});
  bool first = true;
  const std::size_t min_leaf = std::max<std::size_t>(params.min_leaf_size, 1);

  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    const bool forced_here = first && forced_root.has_value();
    first = false;

    {
      Node& n = tree.node(w.node);
      n.class_counts = histogram(w.records, schema.class_count());
      n.majority = majority_of(n.class_counts, n.majority);
      n.train_size = w.records.size();
    }
    const std::vector<Count>& hist = tree.node(w.node).class_counts;
    std::optional<SplitTest> test;
    if (forced_here) {
      test = forced_root;
    } else if (w.depth < depth_budget && w.records.size() >= 2 * min_leaf && !is_pure(hist)) {
      const auto cand = best_entropy_split(w.records, schema, sampler.next(), min_leaf);
      if (cand) test = cand->test;
    }
    if (!test) continue;

    RecordRefs left, right;
    std::size_t known_left = 0, known_right = 0;
    std::vector<const Record*> missing;
    for (const Record* r : w.records) {
      const double v = r->values[test->attr];
      if (is_missing(v)) {
        missing.push_back(r);
      } else if (test->goes_left(v)) {
        left.push_back(r);
        ++known_left;
      } else {
        right.push_back(r);
        ++known_right;
      }
    }
    auto& sink = known_left >= known_right ? left : right;
    sink.insert(sink.end(), missing.begin(), missing.end());

    const ClassId parent_majority = tree.node(w.node).majority;
    Node l, r;
    l.leaf_id = tree.allocate_leaf_id();
    l.majority = parent_majority;
    r.leaf_id = tree.allocate_leaf_id();
    r.majority = parent_majority;
    const std::int32_t li = tree.add_node(std::move(l));
    const std::int32_t ri = tree.add_node(std::move(r));
    Node& parent = tree.node(w.node);
    parent.test = *test;
    parent.left = li;
    parent.right = ri;
    parent.class_counts.clear();
    stack.push_back({ri, std::move(right), w.depth + 1});
    stack.push_back({li, std::move(left), w.depth + 1});
  }
}

DecisionTree induce_tree(const RecordRefs& records, const Schema& schema, const InductionParams& params,
                         AttrSampler& sampler, std::optional<SplitTest> forced_root, std::span<const Record> region) {
  DecisionTree tree = DecisionTree::leaf({}, 0);
  grow_leaf(tree, tree.root(), records, schema, params, sampler, params.max_depth, forced_root);
  tree.finalize();
  if (!schema.numeric_indices().empty()) {
    try {
      if (!region.empty()) {
        tree.set_bounds(aabb_of_records(region, schema));
      } else if (!records.empty()) {
        tree.set_bounds(aabb_of_records(std::span<const Record* const>(records), schema));
      }
    } catch (const DataError&) {
      // Some numeric attribute has no values: the tree carries no geometry.
      tree.set_bounds(std::nullopt);
    }
  }
  return tree;
}

DecisionTree induce_tree(const Batch& batch, const InductionParams& params, AttrSampler& sampler) {
  return induce_tree(refs_of(batch.records), *batch.schema, params, sampler, std::nullopt, batch.records);
}

std::size_t Forest::leaf_total() const {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.leaf_count();
  return n;
}

Forest build_forest(const Batch& batch, std::size_t m, ForestMode mode, const InductionParams& params) {
  if (m < 1) throw ConfigError("ensemble size must be at least 1");
  if (!batch.schema) throw InvalidInput("batch without schema");
  const Schema& schema = *batch.schema;
  Forest forest;
  forest.schema = batch.schema;
  forest.mode = mode;
  forest.params = params;
  forest.trees.reserve(m);
  const RecordRefs all = refs_of(batch.records);
  const std::size_t features = schema.feature_indices().size();

  auto bootstrap = [&](std::size_t k) {
    Rng rng = make_rng(params.seed, "bootstrap", k);
    RecordRefs sample;
    sample.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) sample.push_back(all[uniform_index(rng, all.size())]);
    return sample;
  };

  if (mode == ForestMode::RfStyle) {
    const std::size_t per_split =
        params.attrs_per_split > 0
            ? params.attrs_per_split
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(features, 1)))));
    for (std::size_t k = 0; k < m; ++k) {
      AttrSampler sampler(schema, per_split, make_rng(params.seed, "induction", k));
      const RecordRefs sample = all.empty() ? all : bootstrap(k);
      forest.trees.push_back(induce_tree(sample, schema, params, sampler, std::nullopt, batch.records));
    }
    return forest;
  }

  std::vector<SplitCandidate> roots;
  for (std::size_t attr : schema.feature_indices()) {
    const std::size_t one[] = {attr};
    if (auto c = best_entropy_split(all, schema, one, params.min_leaf_size)) roots.push_back(*c);
  }
  std::stable_sort(roots.begin(), roots.end(),
                   [](const SplitCandidate& a, const SplitCandidate& b) { return a.gain > b.gain + kGainTolerance; });
  for (std::size_t k = 0; k < m; ++k) {
    std::unique_ptr<AttrSampler> sampler =
        params.attrs_per_split > 0
            ? std::make_unique<AttrSampler>(schema, params.attrs_per_split, make_rng(params.seed, "induction", k))
            : std::make_unique<AttrSampler>(schema);
    if (roots.empty()) {
      forest.trees.push_back(induce_tree(all, schema, params, *sampler, std::nullopt, batch.records));
    } else if (k < roots.size()) {
      forest.trees.push_back(induce_tree(all, schema, params, *sampler, roots[k].test, batch.records));
    } else {
      forest.trees.push_back(
          induce_tree(bootstrap(k), schema, params, *sampler, roots[k % roots.size()].test, batch.records));
    }
  }
  return forest;
}

LeafId route(const DecisionTree& tree, const Record& record) { return tree.route(record); }

Vote classify(const Forest& forest, const Record& record) {
  if (forest.trees.empty()) throw InvalidInput("classify with an empty forest");
  Vote v;
  v.votes.assign(forest.schema ? forest.schema->class_count() : 0, 0);
  for (const auto& t : forest.trees) {
    const ClassId c = t.node(t.route_node(record)).majority;
    if (c >= v.votes.size()) v.votes.resize(c + 1, 0);
    ++v.votes[c];
  }
  v.label = majority_of(v.votes, 0);
  return v;
}

}  // namespace adf

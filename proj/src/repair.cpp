#include "adf/repair.hpp"

#include <algorithm>
#include <set>

#include "adf/error.hpp"

namespace adf {

const LeafStat* LeafStatsTable::find(std::size_t tree, LeafId leaf) const {
  if (tree >= trees.size()) return nullptr;
  const auto& row = trees[tree];
  auto it = std::find_if(row.begin(), row.end(), [&](const LeafStat& s) { return s.leaf_id == leaf; });
  return it == row.end() ? nullptr : &*it;
}

namespace {

std::vector<LeafStat> tree_confidences(const DecisionTree& tree, const Batch& batch) {
  const auto ids = tree.leaf_ids();
  std::vector<Count> support(tree.next_leaf_id(), 0), hits(tree.next_leaf_id(), 0);
  for (const auto& r : batch.records) {
    const Node& leaf = tree.node(tree.route_node(r));
    ++support[leaf.leaf_id];
    if (r.label && *r.label == leaf.majority) ++hits[leaf.leaf_id];
  }
  std::vector<LeafStat> row;
  row.reserve(ids.size());
  for (LeafId id : ids) {
    LeafStat s{id, support[id], std::nullopt};
    if (s.support > 0) s.confidence = static_cast<double>(hits[id]) / static_cast<double>(s.support);
    row.push_back(s);
  }
  return row;
}

}  // namespace

LeafStatsTable leaf_confidences(const Forest& forest, const Batch& batch) {
  LeafStatsTable t;
  t.trees.reserve(forest.trees.size());
  for (const auto& tree : forest.trees) t.trees.push_back(tree_confidences(tree, batch));
  return t;
}

std::size_t PerturbedMatrix::flagged_total() const {
  std::size_t n = 0;
  for (std::size_t p = 0; p < rows.size(); ++p) n += flagged_in(p);
  return n;
}

std::size_t PerturbedMatrix::leaf_total() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.size();
  return n;
}

std::size_t PerturbedMatrix::flagged_in(std::size_t tree) const {
  const auto& row = rows.at(tree);
  return static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](const Entry& e) { return e.perturbed; }));
}

bool PerturbedMatrix::is_flagged(std::size_t tree, LeafId leaf) const {
  if (tree >= rows.size()) return false;
  for (const auto& e : rows[tree]) {
    if (e.leaf_id == leaf) return e.perturbed;
  }
  return false;
}

PerturbedMatrix find_perturbed_leaves(const Batch& batch, const Forest& forest, double epsilon,
                                      const LeafStatsTable& prev) {
  if (epsilon < 0) throw ConfigError("epsilon must be non-negative");
  if (prev.trees.size() != forest.trees.size()) {
    throw InvariantError("stale leaf statistics: table has " + std::to_string(prev.trees.size()) +
                         " trees, forest has " + std::to_string(forest.trees.size()));
  }
  const LeafStatsTable current = leaf_confidences(forest, batch);
  PerturbedMatrix f;
  f.rows.resize(forest.trees.size());
  for (std::size_t p = 0; p < forest.trees.size(); ++p) {
    const auto& before = prev.trees[p];
    const auto& now = current.trees[p];
    if (before.size() != now.size()) throw InvariantError("stale leaf statistics for tree " + std::to_string(p));
    f.rows[p].reserve(now.size());
    for (std::size_t q = 0; q < now.size(); ++q) {
      if (before[q].leaf_id != now[q].leaf_id) {
        throw InvariantError("stale leaf statistics for tree " + std::to_string(p));
      }
      const bool flagged =
          before[q].confidence && now[q].confidence && *before[q].confidence > *now[q].confidence + epsilon;
      f.rows[p].push_back({now[q].leaf_id, flagged});
    }
  }
  return f;
}

double perturbed_ratio(const PerturbedMatrix& f) {
  const std::size_t total = f.leaf_total();
  if (total == 0) throw InvariantError("perturbed ratio of a forest without leaves");
  return static_cast<double>(f.flagged_total()) / static_cast<double>(total);
}

double perturbed_ratio(const PerturbedMatrix& f, std::size_t tree) {
  const std::size_t total = f.rows.at(tree).size();
  if (total == 0) throw InvariantError("perturbed ratio of a tree without leaves");
  return static_cast<double>(f.flagged_in(tree)) / static_cast<double>(total);
}

std::string_view to_string(SplitStrategy s) {
  switch (s) {
    case SplitStrategy::Isat: return "isat";
    case SplitStrategy::SatOnly: return "sat-only";
    case SplitStrategy::EntropyOnly: return "entropy-only";
  }
  return "?";
}

SplitStrategy split_strategy_from_string(std::string_view s) {
  if (s == "isat") return SplitStrategy::Isat;
  if (s == "sat-only" || s == "sat") return SplitStrategy::SatOnly;
  if (s == "entropy-only" || s == "entropy") return SplitStrategy::EntropyOnly;
  throw ConfigError("unknown split strategy '" + std::string(s) + "' (expected isat, sat-only or entropy-only)");
}

namespace {

bool impure(const RecordRefs& records) {
  std::optional<ClassId> seen;
  for (const Record* r : records) {
    if (!r->label) continue;
    if (seen && *seen != *r->label) return true;
    seen = r->label;
  }
  return false;
}

TreeRepairReport repair_tree(DecisionTree& tree, std::size_t p, const Batch& batch, const Schema& schema,
                             const InductionParams& params, const PerturbedMatrix& perturbed, double theta,
                             SplitStrategy strategy) {
  TreeRepairReport report;
  report.ratio = perturbed_ratio(perturbed, p);
  report.structural = report.ratio > theta;

  std::set<LeafId> fresh;
  if (report.structural && strategy != SplitStrategy::EntropyOnly) {
    IsatResult res = strategy == SplitStrategy::Isat ? isat_expand(std::move(tree), batch)
                                                     : sat_expand(std::move(tree), batch);
    tree = std::move(res.tree);
    report.geometry = res.outcome;
    fresh.insert(res.fresh_leaves.begin(), res.fresh_leaves.end());
  }

  // Route the batch once against the (possibly expanded) structure.
  std::vector<RecordRefs> routed(tree.next_leaf_id());
  for (const auto& r : batch.records) routed[tree.route(r)].push_back(&r);

  const std::size_t classes = schema.class_count();
  AttrSampler all_attrs(schema);
  for (LeafId id : tree.leaf_ids()) {
    RecordRefs& records = routed[id];
    const bool expandable = report.structural && strategy != SplitStrategy::SatOnly && impure(records) &&
                            (perturbed.is_flagged(p, id) || fresh.count(id) > 0) &&
                            records.size() > params.min_leaf_size;
    if (expandable &&
        best_entropy_split(records, schema, schema.feature_indices(), params.min_leaf_size).has_value()) {
      grow_leaf(tree, tree.leaf_node(id), std::move(records), schema, params, all_attrs, params.max_depth);
      ++report.expanded_leaves;
      continue;
    }
    Node& leaf = tree.leaf(id);
    if (leaf.class_counts.size() < classes) leaf.class_counts.resize(classes, 0);
    bool touched = false;
    for (const Record* r : records) {
      if (!r->label) continue;
      if (*r->label >= leaf.class_counts.size()) leaf.class_counts.resize(*r->label + 1, 0);
      ++leaf.class_counts[*r->label];
      touched = true;
    }
    if (touched) leaf.majority = majority_of(leaf.class_counts, leaf.majority);
  }

  if (!batch.records.empty() && tree.bounds()) {
    try {
      tree.absorb_bounds(aabb_of_records(batch.records, schema));
    } catch (const DataError&) {
      // batch lacks some numeric attribute entirely; keep the old box
    }
  }
  tree.finalize();
  return report;
}

}  // namespace

RepairResult repair_forest(Forest forest, const Batch& batch, const LeafStatsTable& prev_stats,
                           const PerturbedMatrix& perturbed, double theta, SplitStrategy strategy) {
  if (perturbed.rows.size() != forest.trees.size() || prev_stats.trees.size() != forest.trees.size()) {
    throw InvariantError("repair inputs do not match the forest");
  }
  if (!batch.schema->extends(*forest.schema)) throw DataError("batch schema is incompatible with the forest");
  forest.schema = batch.schema;
  RepairResult out;
  out.reports.reserve(forest.trees.size());
  for (std::size_t p = 0; p < forest.trees.size(); ++p) {
    out.reports.push_back(
        repair_tree(forest.trees[p], p, batch, *batch.schema, forest.params, perturbed, theta, strategy));
  }
  out.stats = leaf_confidences(forest, batch);
  out.forest = std::move(forest);
  return out;
}

}  // namespace adf

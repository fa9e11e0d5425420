#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adf/dataset.hpp"
#include "adf/geometry.hpp"
#include "adf/rng.hpp"

namespace adf {

using LeafId = std::uint32_t;
using RecordRefs = std::vector<const Record*>;

RecordRefs refs_of(std::span<const Record> records);

/// Binary split test. Numeric: `value <= threshold` goes left. Categorical:
/// `code == category` goes left.
struct SplitTest {
  enum class Kind : std::uint8_t { NumericThreshold, CategoricalEquals };

  std::size_t attr = 0;
  Kind kind = Kind::NumericThreshold;
  double value = 0.0;

  static SplitTest threshold(std::size_t attr, double t) { return {attr, Kind::NumericThreshold, t}; }
  static SplitTest equals(std::size_t attr, double code) { return {attr, Kind::CategoricalEquals, code}; }

  /// `v` must not be missing.
  bool goes_left(double v) const { return kind == Kind::NumericThreshold ? v <= value : v == value; }

  friend bool operator==(const SplitTest&, const SplitTest&) = default;
};

struct SplitCandidate {
  SplitTest test;
  double gain = 0.0;
};

/// Gains closer than this are treated as equal, and a best gain at or below
/// it counts as "no gain".
inline constexpr double kGainTolerance = 1e-12;

/// Shannon entropy (bits) of a class histogram. Throws InvalidInput when the
/// histogram is empty or all zero.
double entropy(std::span<const Count> class_counts);

/// Best information-gain split of `records` over `candidate_attrs`.
///
/// Numeric candidates are the midpoints between consecutive distinct sorted
/// values; categorical candidates are one-vs-rest equality tests. Records
/// missing the tested attribute are left out of that attribute's gain, which
/// is then scaled by the known fraction. Both children must receive at least
/// `min_leaf_size` records. Ties keep the lower attribute index, then the
/// lower threshold or earlier category code.
std::optional<SplitCandidate> best_entropy_split(std::span<const Record* const> records, const Schema& schema,
                                                 std::span<const std::size_t> candidate_attrs,
                                                 std::size_t min_leaf_size);

/// Node of a DecisionTree. Internal when `left != kNone`.
struct Node {
  static constexpr std::int32_t kNone = -1;

  std::int32_t left = kNone;
  std::int32_t right = kNone;
  SplitTest test{};
  /// Training records absorbed by the subtree (sum over its leaves).
  Count train_size = 0;

  LeafId leaf_id = 0;
  std::vector<Count> class_counts;
  ClassId majority = 0;

  bool is_leaf() const { return left == kNone; }
  friend bool operator==(const Node&, const Node&) = default;
};

/// Argmax of a histogram, lowest class id on ties; `fallback` when all zero.
ClassId majority_of(std::span<const Count> counts, ClassId fallback = 0);

/// Decision tree stored as a node array with index links. After every
/// structural edit, call finalize(): it renumbers nodes into preorder (root at
/// 0), recomputes subtree sizes and rebuilds the leaf-id index, so two trees
/// with the same logical shape are also equal as values.
class DecisionTree {
 public:
  /// A single leaf with the given histogram.
  static DecisionTree leaf(std::vector<Count> class_counts, ClassId fallback_majority = 0);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::int32_t i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  Node& node(std::int32_t i) { return nodes_.at(static_cast<std::size_t>(i)); }
  std::int32_t root() const { return root_; }

  /// Node index reached by `r`. Missing split values follow the child with
  /// the larger train_size (left on ties).
  std::int32_t route_node(const Record& r) const;
  LeafId route(const Record& r) const { return node(route_node(r)).leaf_id; }

  /// Leaf ids in preorder.
  std::vector<LeafId> leaf_ids() const;
  std::size_t leaf_count() const;
  std::size_t depth() const;
  std::size_t depth_of(std::int32_t node_index) const;
  bool has_leaf(LeafId id) const;
  const Node& leaf(LeafId id) const;
  Node& leaf(LeafId id);
  std::int32_t leaf_node(LeafId id) const;

  LeafId next_leaf_id() const { return next_leaf_id_; }
  LeafId allocate_leaf_id() { return next_leaf_id_++; }

  /// Region of all training records absorbed so far (numeric attributes).
  const std::optional<Aabb>& bounds() const { return bounds_; }
  void set_bounds(std::optional<Aabb> b) { bounds_ = std::move(b); }
  /// Grows the stored box to also cover `b` (sets it when absent).
  void absorb_bounds(const Aabb& b);

  std::int32_t add_node(Node n);
  void set_root(std::int32_t r) { root_ = r; }

  void finalize();

  /// Rebuilds a tree from preorder nodes (as serialised); validates links.
  static DecisionTree from_parts(std::vector<Node> nodes, LeafId next_leaf_id, std::optional<Aabb> bounds);

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<Node> nodes_;
  std::int32_t root_ = 0;
  LeafId next_leaf_id_ = 0;
  std::optional<Aabb> bounds_;
  std::vector<std::int32_t> leaf_index_;  // leaf id -> node index, kNone if retired
};

enum class ForestMode { RfStyle, SysForStyle };

std::string_view to_string(ForestMode m);
ForestMode forest_mode_from_string(std::string_view s);

struct InductionParams {
  std::size_t min_leaf_size = 20;
  std::size_t max_depth = 25;
  /// Candidate attributes drawn per node; 0 picks ceil(sqrt(m)) in RfStyle
  /// and all attributes in SysForStyle.
  std::size_t attrs_per_split = 0;
  std::uint64_t seed = 1;

  friend bool operator==(const InductionParams&, const InductionParams&) = default;
};

/// Picks the candidate attributes examined at each node.
class AttrSampler {
 public:
  /// All features at every node.
  explicit AttrSampler(const Schema& schema);
  /// `per_split` random features at every node (all if >= feature count).
  AttrSampler(const Schema& schema, std::size_t per_split, Rng rng);

  std::vector<std::size_t> next();

 private:
  std::vector<std::size_t> features_;
  std::size_t per_split_;
  Rng rng_;
};

/// Grows the leaf at `node_index` top-down on `records`: stops at purity,
/// fewer than 2 * min_leaf_size records, `depth_budget` levels, or when no
/// split has positive gain. The leaf's histogram is replaced by the records'.
/// `forced_root`, when set, is used as the first split regardless of gain.
void grow_leaf(DecisionTree& tree, std::int32_t node_index, RecordRefs records, const Schema& schema,
               const InductionParams& params, AttrSampler& sampler, std::size_t depth_budget,
               std::optional<SplitTest> forced_root = std::nullopt);

/// Induces a tree on `records`; the stored bounds are the box of `region`
/// (the records the tree is considered to have absorbed).
DecisionTree induce_tree(const RecordRefs& records, const Schema& schema, const InductionParams& params,
                         AttrSampler& sampler, std::optional<SplitTest> forced_root = std::nullopt,
                         std::span<const Record> region = {});
DecisionTree induce_tree(const Batch& batch, const InductionParams& params, AttrSampler& sampler);

struct Forest {
  SchemaPtr schema;
  ForestMode mode = ForestMode::RfStyle;
  InductionParams params;
  std::vector<DecisionTree> trees;

  std::size_t leaf_total() const;
  friend bool operator==(const Forest& a, const Forest& b) {
    return a.schema->digest() == b.schema->digest() && a.mode == b.mode && a.params == b.params && a.trees == b.trees;
  }
};

/// Builds `m` trees on `batch`.
///
/// RfStyle: every tree sees a bootstrap sample (with replacement, batch size)
/// and ceil(sqrt(#features)) random candidate attributes per node.
/// SysForStyle: the best split of each attribute at the root is ranked by
/// gain; tree k uses the k-th of them as its root and grows greedily over all
/// attributes on the full batch. When fewer than `m` attributes admit a root
/// split, the extra trees cycle through the ranked splits again on bootstrap
/// samples.
Forest build_forest(const Batch& batch, std::size_t m, ForestMode mode, const InductionParams& params);

LeafId route(const DecisionTree& tree, const Record& record);

struct Vote {
  ClassId label = 0;
  std::vector<Count> votes;
};

/// Majority vote of the leaf majorities; lowest class id wins ties.
Vote classify(const Forest& forest, const Record& record);

}  // namespace adf

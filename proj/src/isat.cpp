#include "adf/isat.hpp"

#include <cmath>
#include <limits>

#include "adf/error.hpp"

namespace adf {

Aabb aabb_of_tree(const DecisionTree& tree) {
  if (!tree.bounds()) throw DataError("tree has no numeric geometry");
  return *tree.bounds();
}

std::string_view to_string(IsatOutcome o) {
  switch (o) {
    case IsatOutcome::Disjoint: return "disjoint";
    case IsatOutcome::Overlap: return "overlap";
    case IsatOutcome::FullyContained: return "contained";
  }
  return "?";
}

namespace {

// Wraps the current root under a new internal node. The fresh leaf goes on
// `fresh_side`, the existing tree on the other side.
LeafId wrap_root(DecisionTree& tree, const SplitTest& test, Side fresh_side) {
  Node fresh;
  fresh.leaf_id = tree.allocate_leaf_id();
  const std::int32_t fresh_index = tree.add_node(std::move(fresh));
  Node root;
  root.test = test;
  root.left = fresh_side == Side::Left ? fresh_index : tree.root();
  root.right = fresh_side == Side::Left ? tree.root() : fresh_index;
  tree.set_root(tree.add_node(std::move(root)));
  return tree.node(fresh_index).leaf_id;
}

// Gives each fresh leaf the majority of the batch records routed to it.
void label_fresh_leaves(IsatResult& result, const Batch& batch) {
  if (result.fresh_leaves.empty()) return;
  result.tree.finalize();
  std::vector<std::vector<Count>> hist(result.fresh_leaves.size());
  for (const auto& r : batch.records) {
    if (!r.label) continue;
    const LeafId id = result.tree.route(r);
    for (std::size_t k = 0; k < result.fresh_leaves.size(); ++k) {
      if (result.fresh_leaves[k] != id) continue;
      if (hist[k].size() <= *r.label) hist[k].resize(*r.label + 1, 0);
      ++hist[k][*r.label];
    }
  }
  const ClassId overall = majority_of(batch.class_histogram(), 0);
  for (std::size_t k = 0; k < result.fresh_leaves.size(); ++k) {
    result.tree.leaf(result.fresh_leaves[k]).majority = majority_of(hist[k], overall);
  }
}

std::optional<std::pair<Aabb, Aabb>> boxes(const DecisionTree& tree, const Batch& batch) {
  if (!tree.bounds() || batch.records.empty()) return std::nullopt;
  try {
    Aabb b = aabb_of_records(batch.records, *batch.schema);
    if (b.attrs != tree.bounds()->attrs) throw InvalidInput("batch and tree span different numeric attributes");
    if (b.dims() == 0) return std::nullopt;
    return std::make_pair(*tree.bounds(), std::move(b));
  } catch (const InvalidInput&) {
    throw;
  } catch (const DataError&) {
    return std::nullopt;
  }
}

bool apply_disjoint(IsatResult& result, const Aabb& tree_box, const Aabb& batch_box) {
  const auto split = sat_split(tree_box, batch_box);
  if (!split) return false;
  result.fresh_leaves.push_back(
      wrap_root(result.tree, SplitTest::threshold(split->attr, split->value), split->new_side));
  result.outcome = IsatOutcome::Disjoint;
  return true;
}

}  // namespace

IsatResult isat_expand(DecisionTree tree, const Batch& batch) {
  IsatResult result{std::move(tree), IsatOutcome::FullyContained, {}};
  const auto bx = boxes(result.tree, batch);
  if (!bx) return result;
  const auto& [tbox, bbox] = *bx;
  if (!apply_disjoint(result, tbox, bbox)) {
    // Largest excess above the tree's upper bounds.
    std::size_t up_axis = 0;
    double up_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < tbox.dims(); ++j) {
      const double d = bbox.upper[j] - tbox.upper[j];
      if (d > up_max) {
        up_max = d;
        up_axis = j;
      }
    }
    if (up_max > 0) {
      result.fresh_leaves.push_back(
          wrap_root(result.tree, SplitTest::threshold(tbox.attrs[up_axis], tbox.upper[up_axis]), Side::Right));
    }
    std::size_t down_axis = 0;
    double down_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < tbox.dims(); ++j) {
      const double d = tbox.lower[j] - bbox.lower[j];
      if (d > down_max) {
        down_max = d;
        down_axis = j;
      }
    }
    if (down_max > 0) {
      // x <= prev(LB) is x < LB, so records on the old boundary stay in the old tree.
      const double t = std::nextafter(tbox.lower[down_axis], -std::numeric_limits<double>::infinity());
      result.fresh_leaves.push_back(wrap_root(result.tree, SplitTest::threshold(tbox.attrs[down_axis], t), Side::Left));
    }
    if (!result.fresh_leaves.empty()) result.outcome = IsatOutcome::Overlap;
  }
  label_fresh_leaves(result, batch);
  result.tree.finalize();
  return result;
}

IsatResult sat_expand(DecisionTree tree, const Batch& batch) {
  IsatResult result{std::move(tree), IsatOutcome::FullyContained, {}};
  const auto bx = boxes(result.tree, batch);
  if (!bx) return result;
  apply_disjoint(result, bx->first, bx->second);
  label_fresh_leaves(result, batch);
  result.tree.finalize();
  return result;
}

}  // namespace adf

#pragma once

#include <vector>

#include "adf/dataset.hpp"
#include "adf/geometry.hpp"
#include "adf/tree.hpp"

namespace adf {

/// Stored training region of a tree. Throws DataError when the tree carries
/// no geometry (no numeric attributes, or one of them never observed).
Aabb aabb_of_tree(const DecisionTree& tree);

enum class IsatOutcome {
  Disjoint,        // batch box separated from the tree box: one SAT root added
  Overlap,         // boxes overlap; roots added at the tree's outer boundaries
  FullyContained,  // nothing added; the caller relies on entropy expansion only
};

std::string_view to_string(IsatOutcome o);

struct IsatResult {
  DecisionTree tree;
  IsatOutcome outcome = IsatOutcome::FullyContained;
  /// Leaves created for the new region(s). They hold no counts yet; their
  /// majority is the majority of the batch records that reach them.
  std::vector<LeafId> fresh_leaves;
};

/// Structural repair of `tree` for `batch`.
///
/// Disjoint boxes: a new root splits at the SAT midpoint with the old tree on
/// one side and a fresh leaf on the other. Overlapping boxes: when the batch
/// reaches above the tree's upper bound on some axis, a root `x <= UB[axis]`
/// puts the old tree left and a fresh leaf right (axis of largest excess);
/// then, when it reaches below the lower bound, a root that sends `x < LB[axis]`
/// to a fresh leaf on the left wraps the result. Records inside the old
/// region keep their old leaves.
IsatResult isat_expand(DecisionTree tree, const Batch& batch);

/// The disjoint branch only (plain SAT). Overlapping boxes yield
/// FullyContained.
IsatResult sat_expand(DecisionTree tree, const Batch& batch);

}  // namespace adf

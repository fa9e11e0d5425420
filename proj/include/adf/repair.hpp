#pragma once

#include <optional>
#include <vector>

#include "adf/dataset.hpp"
#include "adf/isat.hpp"
#include "adf/tree.hpp"

namespace adf {

struct LeafStat {
  LeafId leaf_id = 0;
  Count support = 0;                 // batch records routed to the leaf
  std::optional<double> confidence;  // set iff support > 0

  friend bool operator==(const LeafStat&, const LeafStat&) = default;
};

/// Per-tree leaf confidences of a forest snapshot. Row p lists the leaves of
/// tree p in preorder.
struct LeafStatsTable {
  std::vector<std::vector<LeafStat>> trees;

  const LeafStat* find(std::size_t tree, LeafId leaf) const;
  friend bool operator==(const LeafStatsTable&, const LeafStatsTable&) = default;
};

/// Confidence of a leaf = share of its routed batch records whose label is
/// the leaf's stored majority. Leaves that receive nothing stay undefined.
LeafStatsTable leaf_confidences(const Forest& forest, const Batch& batch);

/// Binary perturbation flags, one row per tree in preorder leaf order.
struct PerturbedMatrix {
  struct Entry {
    LeafId leaf_id = 0;
    bool perturbed = false;
  };
  std::vector<std::vector<Entry>> rows;

  std::size_t flagged_total() const;
  std::size_t leaf_total() const;
  std::size_t flagged_in(std::size_t tree) const;
  bool is_flagged(std::size_t tree, LeafId leaf) const;
};

/// Flags leaf (p, q) when its previous confidence exceeds its confidence on
/// `batch` by more than `epsilon`. Leaves undefined on either side are not
/// flagged. Throws InvariantError when `prev` does not describe this forest's
/// leaves.
PerturbedMatrix find_perturbed_leaves(const Batch& batch, const Forest& forest, double epsilon,
                                      const LeafStatsTable& prev);

/// Flagged share of all leaves; InvariantError for a forest without leaves.
double perturbed_ratio(const PerturbedMatrix& f);
/// Flagged share within one tree's row.
double perturbed_ratio(const PerturbedMatrix& f, std::size_t tree);

enum class SplitStrategy { Isat, SatOnly, EntropyOnly };

std::string_view to_string(SplitStrategy s);
SplitStrategy split_strategy_from_string(std::string_view s);

struct TreeRepairReport {
  double ratio = 0.0;
  bool structural = false;  // ratio > theta
  IsatOutcome geometry = IsatOutcome::FullyContained;
  std::size_t expanded_leaves = 0;
};

struct RepairResult {
  Forest forest;
  LeafStatsTable stats;
  std::vector<TreeRepairReport> reports;
};

/// Repairs every tree of `forest` with `batch`.
///
/// A tree whose own perturbed ratio exceeds `theta` is first expanded
/// geometrically (iSAT, or plain SAT for SatOnly; skipped for EntropyOnly).
/// Then, except under SatOnly, every leaf that is impure on its routed batch
/// records, flagged or freshly created, and reached by more than
/// min_leaf_size records is regrown by entropy splitting on those records.
/// All other leaves add the batch's routed class counts to their histograms.
/// Each tree's stored box grows by the batch box. The returned statistics
/// are the leaf confidences of the repaired forest on `batch`.
RepairResult repair_forest(Forest forest, const Batch& batch, const LeafStatsTable& prev_stats,
                           const PerturbedMatrix& perturbed, double theta, SplitStrategy strategy = SplitStrategy::Isat);

}  // namespace adf

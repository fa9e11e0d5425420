#pragma once

#include <deque>
#include <optional>
#include <string_view>

#include "adf/dataset.hpp"
#include "adf/repair.hpp"
#include "adf/tree.hpp"

namespace adf {

struct AdfParams {
  std::size_t lambda = 3;   // drift threshold: promote once cdf > lambda
  double theta = 0.4;       // repairable threshold on the perturbed-leaf ratio
  double epsilon = 0.02;    // confidence drop tolerated before a leaf counts as perturbed
  std::size_t gamma = 3;    // window size in batches
  std::size_t trees = 10;   // M
  ForestMode mode = ForestMode::RfStyle;
  SplitStrategy split_strategy = SplitStrategy::Isat;
  InductionParams induction;
  /// false disables the window and the temporary forest (ablation).
  bool enable_temporary_forest = true;

  /// Throws ConfigError naming the first violated bound.
  void validate() const;
  friend bool operator==(const AdfParams&, const AdfParams&) = default;
};

enum class ForestRole { PF, AF, TF };

std::string_view to_string(ForestRole r);
ForestRole forest_role_from_string(std::string_view s);

/// What the last learn_batch call did; for logging only.
struct StepReport {
  std::optional<double> pf_ratio;
  std::optional<double> af_ratio;
  std::optional<double> tf_ratio;
  bool af_repaired = false;
  bool tf_built = false;
  bool tf_rebuilt = false;
  bool tf_repaired = false;
  bool promoted = false;
};

struct AdfState {
  AdfParams params;
  std::optional<Forest> pf, af, tf;
  std::optional<LeafStatsTable> pf_stats, af_stats, tf_stats;
  std::deque<Batch> window;  // oldest first
  std::size_t cdf = 0;
  std::size_t batches_seen = 0;
  ForestRole last_recommendation = ForestRole::PF;
  StepReport last_step;

  AdfState() = default;
  explicit AdfState(AdfParams p) : params(std::move(p)) { params.validate(); }

  bool trained() const { return pf.has_value(); }
  const Forest& forest(ForestRole role) const;
};

/// Drift test: strictly more unrepairable batches than lambda.
inline bool detect_scd(std::size_t cdf, std::size_t lambda) { return cdf > lambda; }

/// Drops the oldest batch when the window is full, then appends `batch`.
void update_window(std::deque<Batch>& window, Batch batch, std::size_t gamma);

/// Processes one labelled batch and returns the next state.
///
/// The permanent forest is repaired on every batch. The active forest is
/// repaired while its perturbed ratio stays within theta; such a batch also
/// clears the drift counter and discards the temporary forest. Otherwise the
/// batch enters the window, the drift counter grows, and the temporary forest
/// is built, repaired, or rebuilt from the window. A rebuild while the counter
/// exceeds lambda promotes the temporary forest to active.
AdfState learn_batch(AdfState state, const Batch& batch);

/// Role of the existing forest that classifies `batch` most accurately;
/// ties prefer PF, then AF, then TF.
ForestRole select_best_forest(const AdfState& state, const Batch& batch);

/// Vote of the recommended forest. Throws InvariantError before training.
ClassId predict(const AdfState& state, const Record& record);

/// Fraction of labelled records of `batch` that `forest` classifies correctly.
double forest_accuracy(const Forest& forest, const Batch& batch);

}  // namespace adf

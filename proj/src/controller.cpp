#include "adf/controller.hpp"

#include <vector>

#include "adf/error.hpp"

namespace adf {

void AdfParams::validate() const {
  if (lambda < 1) throw ConfigError("lambda must be at least 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (gamma < 1) throw ConfigError("gamma must be at least 1");
  if (trees < 1) throw ConfigError("the forest needs at least one tree");
  if (induction.min_leaf_size < 1) throw ConfigError("min_leaf_size must be at least 1");
  if (induction.max_depth < 1) throw ConfigError("max_depth must be at least 1");
}

std::string_view to_string(ForestRole r) {
  switch (r) {
    case ForestRole::PF: return "PF";
    case ForestRole::AF: return "AF";
    case ForestRole::TF: return "TF";
  }
  return "?";
}

ForestRole forest_role_from_string(std::string_view s) {
  if (s == "PF") return ForestRole::PF;
  if (s == "AF") return ForestRole::AF;
  if (s == "TF") return ForestRole::TF;
  throw DataError("unknown forest role '" + std::string(s) + "'");
}

const Forest& AdfState::forest(ForestRole role) const {
  const std::optional<Forest>* f = role == ForestRole::PF ? &pf : role == ForestRole::AF ? &af : &tf;
  if (!f->has_value()) throw InvariantError("forest " + std::string(to_string(role)) + " does not exist");
  return **f;
}

void update_window(std::deque<Batch>& window, Batch batch, std::size_t gamma) {
  while (!window.empty() && window.size() >= gamma) window.pop_front();
  window.push_back(std::move(batch));
}

double forest_accuracy(const Forest& forest, const Batch& batch) {
  std::size_t hits = 0, total = 0;
  for (const auto& r : batch.records) {
    if (!r.label) continue;
    ++total;
    if (classify(forest, r).label == *r.label) ++hits;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

Forest build(const AdfParams& p, const Batch& data, std::string_view stream, std::size_t index) {
  InductionParams ip = p.induction;
  ip.seed = derive_seed(p.induction.seed, stream, index);
  return build_forest(data, p.trees, p.mode, ip);
}

Batch window_union(const std::deque<Batch>& window, std::int64_t id) {
  std::vector<Batch> parts(window.begin(), window.end());
  return concat(parts, id);
}

void check_batch(const AdfState& state, const Batch& batch) {
  if (!batch.schema) throw DataError("batch " + std::to_string(batch.batch_id) + " has no schema");
  if (batch.records.empty()) throw DataError("batch " + std::to_string(batch.batch_id) + " is empty");
  if (!batch.labeled()) throw DataError("batch " + std::to_string(batch.batch_id) + " has unlabelled records");
  if (state.pf && !batch.schema->extends(*state.pf->schema)) {
    throw DataError("batch " + std::to_string(batch.batch_id) + " does not match the stream schema");
  }
}

}  // namespace

AdfState learn_batch(AdfState state, const Batch& batch) {
  state.params.validate();
  check_batch(state, batch);
  const AdfParams& p = state.params;
  const std::size_t step = state.batches_seen++;
  StepReport report;

  if (!state.pf) {
    state.pf = build(p, batch, "pf", step);
    state.pf_stats = leaf_confidences(*state.pf, batch);
    state.af = state.pf;
    state.af_stats = state.pf_stats;
    state.last_step = report;
    state.last_recommendation = select_best_forest(state, batch);
    return state;
  }

  {
    const PerturbedMatrix f = find_perturbed_leaves(batch, *state.pf, p.epsilon, *state.pf_stats);
    report.pf_ratio = perturbed_ratio(f);
    RepairResult r = repair_forest(std::move(*state.pf), batch, *state.pf_stats, f, p.theta, p.split_strategy);
    state.pf = std::move(r.forest);
    state.pf_stats = std::move(r.stats);
  }

  const PerturbedMatrix fa = find_perturbed_leaves(batch, *state.af, p.epsilon, *state.af_stats);
  report.af_ratio = perturbed_ratio(fa);
  if (*report.af_ratio <= p.theta) {
    RepairResult r = repair_forest(std::move(*state.af), batch, *state.af_stats, fa, p.theta, p.split_strategy);
    state.af = std::move(r.forest);
    state.af_stats = std::move(r.stats);
    report.af_repaired = true;
    state.cdf = 0;
    state.tf.reset();
    state.tf_stats.reset();
  } else if (p.enable_temporary_forest) {
    update_window(state.window, batch, p.gamma);
    ++state.cdf;
    const Batch pooled = window_union(state.window, batch.batch_id);
    if (!state.tf) {
      state.tf = build(p, pooled, "tf", step);
      state.tf_stats = leaf_confidences(*state.tf, batch);
      report.tf_built = true;
    } else {
      const PerturbedMatrix ft = find_perturbed_leaves(batch, *state.tf, p.epsilon, *state.tf_stats);
      report.tf_ratio = perturbed_ratio(ft);
      if (*report.tf_ratio <= p.theta) {
        RepairResult r = repair_forest(std::move(*state.tf), batch, *state.tf_stats, ft, p.theta, p.split_strategy);
        state.tf = std::move(r.forest);
        state.tf_stats = std::move(r.stats);
        report.tf_repaired = true;
      } else {
        state.tf = build(p, pooled, "tf", step);
        state.tf_stats = leaf_confidences(*state.tf, batch);
        report.tf_rebuilt = true;
        if (detect_scd(state.cdf, p.lambda)) {
          state.af = std::move(state.tf);
          state.af_stats = std::move(state.tf_stats);
          state.tf.reset();
          state.tf_stats.reset();
          state.cdf = 0;
          report.promoted = true;
        }
      }
    }
  }

  state.last_step = report;
  state.last_recommendation = select_best_forest(state, batch);
  return state;
}

ForestRole select_best_forest(const AdfState& state, const Batch& batch) {
  if (!state.pf) throw InvariantError("model is not trained");
  ForestRole best = ForestRole::PF;
  double best_acc = forest_accuracy(*state.pf, batch);
  if (state.af) {
    const double acc = forest_accuracy(*state.af, batch);
    if (acc > best_acc) best = ForestRole::AF, best_acc = acc;
  }
  if (state.tf) {
    const double acc = forest_accuracy(*state.tf, batch);
    if (acc > best_acc) best = ForestRole::TF, best_acc = acc;
  }
  return best;
}

ClassId predict(const AdfState& state, const Record& record) {
  if (!state.trained()) throw InvariantError("model is not trained");
  const ForestRole role = state.last_recommendation;
  const std::optional<Forest>& f = role == ForestRole::PF ? state.pf : role == ForestRole::AF ? state.af : state.tf;
  // a recommendation can outlive the forest it named (e.g. TF discarded)
  return classify(f ? *f : *state.pf, record).label;
}

}  // namespace adf

#include "adf/evalstat.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "adf/error.hpp"

namespace adf {

double accuracy(std::span<const ClassId> predictions, std::span<const ClassId> truths) {
  if (predictions.size() != truths.size()) throw InvalidInput("prediction and truth lists differ in length");
  if (predictions.empty()) throw InvalidInput("accuracy of an empty prediction list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == truths[i];
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double sign_test(std::size_t wins, std::size_t losses) {
  const std::size_t n = wins + losses;
  if (n == 0) throw InvalidInput("sign test needs at least one non-tied comparison");
  const double nd = static_cast<double>(n);
  return (static_cast<double>(wins) - nd / 2.0 - 0.5) / (std::sqrt(nd) / 2.0);
}

namespace {

// q_alpha(k) = studentized range quantile (infinite df) / sqrt(2), k = 2..25.
constexpr std::array<double, 24> kQ05{1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102,
                                      3.164, 3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458,
                                      3.489, 3.517, 3.544, 3.569, 3.593, 3.616, 3.637, 3.658};
constexpr std::array<double, 24> kQ025{2.241, 2.604, 2.817, 2.968, 3.084, 3.177, 3.256, 3.324,
                                       3.383, 3.435, 3.482, 3.525, 3.564, 3.600, 3.634, 3.665,
                                       3.694, 3.721, 3.747, 3.771, 3.794, 3.816, 3.836, 3.856};
constexpr std::array<double, 24> kQ01{2.576, 2.913, 3.113, 3.255, 3.364, 3.452, 3.526, 3.590,
                                      3.646, 3.696, 3.741, 3.781, 3.818, 3.853, 3.884, 3.914,
                                      3.941, 3.967, 3.992, 4.015, 4.037, 4.057, 4.077, 4.096};

bool same_alpha(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

double z_reference(double alpha) {
  if (same_alpha(alpha, 0.05)) return 1.645;
  if (same_alpha(alpha, 0.025)) return 1.960;
  if (same_alpha(alpha, 0.01)) return 2.326;
  throw ConfigError("unsupported significance level (use 0.05, 0.025 or 0.01)");
}

double nemenyi_q(std::size_t k, double alpha) {
  const std::array<double, 24>* table = same_alpha(alpha, 0.05)    ? &kQ05
                                        : same_alpha(alpha, 0.025) ? &kQ025
                                        : same_alpha(alpha, 0.01)  ? &kQ01
                                                                   : nullptr;
  if (!table) throw ConfigError("unsupported significance level (use 0.05, 0.025 or 0.01)");
  if (k < 2 || k > 25) throw InvalidInput("Nemenyi table covers 2 to 25 methods");
  return (*table)[k - 2];
}

double nemenyi_cd(std::size_t k, std::size_t n, double alpha) {
  const double q = nemenyi_q(k, alpha);
  if (n < 1) throw InvalidInput("Nemenyi test needs at least one block");
  const double kd = static_cast<double>(k);
  return q * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

std::size_t ResultsTable::method_index(std::string_view name) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i] == name) return i;
  }
  throw ConfigError("method '" + std::string(name) + "' is not in the results");
}

double ResultsTable::mean_accuracy(std::size_t method) const { return mean_accuracy(method, ""); }

double ResultsTable::mean_accuracy(std::size_t method, std::string_view label_prefix) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    if (!batches[b].label.starts_with(label_prefix)) continue;
    const auto& c = cells.at(method).at(b);
    if (!c.accuracy) continue;
    sum += *c.accuracy;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

double ResultsTable::total_train_ms(std::size_t method) const {
  double sum = 0.0;
  for (const auto& c : cells.at(method)) sum += c.train_ms;
  return sum;
}

bool ResultsTable::complete() const {
  for (const auto& row : cells) {
    for (const auto& c : row) {
      if (!c.accuracy) return false;
    }
  }
  return true;
}

namespace {

// Adds per-block ranks of every method to `sums`.
void accumulate_ranks(const ResultsTable& t, std::vector<double>& sums, std::size_t& blocks) {
  const std::size_t k = t.methods.size();
  for (std::size_t b = 0; b < t.batches.size(); ++b) {
    std::vector<double> acc(k);
    for (std::size_t m = 0; m < k; ++m) {
      const auto& c = t.cells.at(m).at(b);
      if (!c.accuracy) {
        throw DataError("missing result for method " + t.methods[m] + " on batch " +
                        std::to_string(t.batches[b].batch_id));
      }
      acc[m] = *c.accuracy;
    }
    for (std::size_t m = 0; m < k; ++m) {
      std::size_t better = 0, equal = 0;
      for (std::size_t o = 0; o < k; ++o) {
        if (acc[o] > acc[m]) ++better;
        else if (acc[o] == acc[m]) ++equal;
      }
      // positions better+1 .. better+equal share their average
      sums[m] += static_cast<double>(better) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    ++blocks;
  }
}

}  // namespace

std::map<std::string, double> mean_ranks(const ResultsTable& table) {
  return mean_ranks(std::span<const ResultsTable>(&table, 1));
}

std::map<std::string, double> mean_ranks(std::span<const ResultsTable> tables) {
  if (tables.empty()) return {};
  const auto& methods = tables.front().methods;
  std::vector<double> sums(methods.size(), 0.0);
  std::size_t blocks = 0;
  for (const auto& t : tables) {
    if (t.methods != methods) throw DataError("result tables compare different methods");
    accumulate_ranks(t, sums, blocks);
  }
  std::map<std::string, double> out;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    out[methods[m]] = blocks == 0 ? 1.0 : sums[m] / static_cast<double>(blocks);
  }
  return out;
}

void write_matrix_csv(const ResultsTable& table, std::ostream& out) {
  out << "method";
  for (const auto& b : table.batches) out << ",batch_" << b.batch_id;
  out << ",mean_accuracy,total_train_ms\n";
  out << std::setprecision(6);
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    out << table.methods[m];
    for (const auto& c : table.cells[m]) {
      out << ',';
      if (c.accuracy) out << *c.accuracy;
      else out << "failed";
    }
    out << ',' << table.mean_accuracy(m) << ',' << table.total_train_ms(m) << '\n';
  }
}

void write_long_csv(std::span<const ResultsTable> tables, std::ostream& out) {
  out << "seed,method,batch,scenario,accuracy,time_ms\n";
  out << std::setprecision(6);
  for (const auto& t : tables) {
    for (std::size_t m = 0; m < t.methods.size(); ++m) {
      for (std::size_t b = 0; b < t.batches.size(); ++b) {
        const auto& c = t.cells[m][b];
        out << t.seed << ',' << t.methods[m] << ',' << t.batches[b].batch_id << ',' << t.batches[b].label << ',';
        if (c.accuracy) out << *c.accuracy;
        else out << "failed";
        out << ',' << c.train_ms << '\n';
      }
    }
  }
}

namespace {

class AdfLearner final : public Learner {
 public:
  explicit AdfLearner(AdfParams p) : state_(std::move(p)) {}
  void learn(const Batch& batch) override { state_ = learn_batch(std::move(state_), batch); }
  ClassId predict(const Record& record) const override { return adf::predict(state_, record); }

 private:
  AdfState state_;
};

class RetrainLearner final : public Learner {
 public:
  explicit RetrainLearner(AdfParams p) : params_(std::move(p)) {}
  void learn(const Batch& batch) override {
    InductionParams ip = params_.induction;
    ip.seed = derive_seed(params_.induction.seed, "retrain", count_++);
    forest_ = build_forest(batch, params_.trees, params_.mode, ip);
  }
  ClassId predict(const Record& record) const override {
    if (!forest_) throw InvariantError("model is not trained");
    return classify(*forest_, record).label;
  }

 private:
  AdfParams params_;
  std::optional<Forest> forest_;
  std::uint64_t count_ = 0;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"adf-isat", "adf-sat-only", "adf-entropy-only", "adf-no-tf", "full-retrain"};
  return m;
}

std::unique_ptr<Learner> make_learner(const std::string& method, const AdfParams& params) {
  AdfParams p = params;
  if (method == "full-retrain") return std::make_unique<RetrainLearner>(p);
  if (method == "adf-isat") {
    p.split_strategy = SplitStrategy::Isat;
  } else if (method == "adf-sat-only") {
    p.split_strategy = SplitStrategy::SatOnly;
  } else if (method == "adf-entropy-only") {
    p.split_strategy = SplitStrategy::EntropyOnly;
  } else if (method == "adf-no-tf") {
    p.enable_temporary_forest = false;
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  return std::make_unique<AdfLearner>(p);
}

ResultsTable run_experiment(std::span<const BatchPair> stream, const std::vector<std::string>& methods,
                            const AdfParams& params, const LearnerFactory& factory) {
  if (methods.empty()) throw ConfigError("no methods to evaluate");
  ResultsTable table;
  table.seed = params.induction.seed;
  table.params_digest = dump(to_json(params));
  table.methods = methods;
  for (const auto& p : stream) table.batches.push_back({p.train.batch_id, p.label});

  // Labels are split off before any learner sees a test record.
  std::vector<std::vector<Record>> unlabeled(stream.size());
  std::vector<std::vector<ClassId>> truths(stream.size());
  for (std::size_t b = 0; b < stream.size(); ++b) {
    for (const auto& r : stream[b].test.records) {
      if (!r.label) throw DataError("test batch " + std::to_string(stream[b].test.batch_id) + " is unlabelled");
      truths[b].push_back(*r.label);
      Record copy = r;
      copy.label.reset();
      unlabeled[b].push_back(std::move(copy));
    }
  }

  for (const auto& method : methods) {
    auto learner = factory ? factory(method) : make_learner(method, params);
    std::vector<Cell> row(stream.size());
    for (std::size_t b = 0; b < stream.size(); ++b) {
      Cell& cell = row[b];
      try {
        auto t0 = std::chrono::steady_clock::now();
        learner->learn(stream[b].train);
        cell.train_ms = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        std::vector<ClassId> predictions;
        predictions.reserve(unlabeled[b].size());
        for (const auto& r : unlabeled[b]) predictions.push_back(learner->predict(r));
        cell.predict_ms = elapsed_ms(t0);
        cell.accuracy = accuracy(predictions, truths[b]);
      } catch (const std::exception& e) {
        cell.accuracy.reset();
        cell.error = e.what();
      }
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

SignificanceReport compare_methods(std::span<const ResultsTable> tables, const std::string& reference, double alpha) {
  if (tables.empty()) throw InvalidInput("no result tables to compare");
  SignificanceReport rep;
  rep.reference = reference;
  rep.alpha = alpha;
  rep.z_ref = z_reference(alpha);
  const auto& methods = tables.front().methods;
  const std::size_t ref = tables.front().method_index(reference);
  const auto ranks = mean_ranks(tables);
  for (const auto& t : tables) rep.blocks += t.batches.size();
  rep.reference_rank = ranks.at(reference);
  if (methods.size() >= 2) rep.critical_difference = nemenyi_cd(methods.size(), std::max<std::size_t>(1, rep.blocks), alpha);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    if (m == ref) continue;
    MethodComparison c;
    c.method = methods[m];
    for (const auto& t : tables) {
      for (std::size_t b = 0; b < t.batches.size(); ++b) {
        const double r = *t.cells[ref][b].accuracy;
        const double o = *t.cells[m][b].accuracy;
        if (r > o) ++c.wins;
        else if (r < o) ++c.losses;
        else ++c.ties;
      }
    }
    if (c.wins + c.losses > 0) {
      c.z = sign_test(c.wins, c.losses);
      c.significant = *c.z > rep.z_ref;
    }
    c.mean_rank = ranks.at(c.method);
    c.rank_gap = c.mean_rank - rep.reference_rank;
    c.rank_significant = std::abs(c.rank_gap) > rep.critical_difference;
    rep.rows.push_back(std::move(c));
  }
  return rep;
}

void write_report(const SignificanceReport& r, std::ostream& out) {
  out << std::fixed << std::setprecision(3);
  out << "reference: " << r.reference << "\n";
  out << "alpha: " << r.alpha << "  z_ref: " << r.z_ref << "  blocks: " << r.blocks << "\n";
  out << "nemenyi critical difference: " << r.critical_difference << "  reference mean rank: " << r.reference_rank
      << "\n\n";
  out << "method                 wins losses ties       z  sign-sig  mean-rank  rank-gap  nemenyi-sig\n";
  for (const auto& c : r.rows) {
    out << std::left << std::setw(22) << c.method << std::right << std::setw(5) << c.wins << std::setw(7) << c.losses
        << std::setw(5) << c.ties << std::setw(8);
    if (c.z) out << *c.z;
    else out << "n/a";
    out << std::setw(10) << (c.significant ? "yes" : "no") << std::setw(11) << c.mean_rank << std::setw(10)
        << c.rank_gap << std::setw(13) << (c.rank_significant ? "yes" : "no") << "\n";
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace adf

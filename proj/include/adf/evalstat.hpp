#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adf/controller.hpp"
#include "adf/dataset.hpp"
#include "adf/streamgen.hpp"

namespace adf {

/// Matching fraction; InvalidInput on empty or unequal inputs.
double accuracy(std::span<const ClassId> predictions, std::span<const ClassId> truths);

/// Sign test statistic with continuity correction:
/// z = (wins - n/2 - 0.5) / (sqrt(n) / 2), n = wins + losses (ties dropped).
/// InvalidInput when n == 0.
double sign_test(std::size_t wins, std::size_t losses);

/// One-tailed standard normal critical value for alpha in {0.05, 0.025, 0.01}.
double z_reference(double alpha);

/// Studentized-range based Nemenyi constant q_alpha(k) for 2 <= k <= 25.
double nemenyi_q(std::size_t k, double alpha);

/// Critical difference q_alpha(k) * sqrt(k(k+1) / (6N)). ConfigError for an
/// unsupported alpha, InvalidInput for k < 2 or N < 1.
double nemenyi_cd(std::size_t k, std::size_t n, double alpha);

struct Cell {
  std::optional<double> accuracy;  // empty when the method failed on this batch
  double train_ms = 0.0;
  double predict_ms = 0.0;
  std::string error;
};

struct BatchInfo {
  std::int64_t batch_id = 0;
  std::string label;
};

struct ResultsTable {
  std::uint64_t seed = 0;
  std::string params_digest;
  std::vector<std::string> methods;
  std::vector<BatchInfo> batches;
  std::vector<std::vector<Cell>> cells;  // [method][batch]

  std::size_t method_index(std::string_view name) const;
  /// Mean over the filled cells (NaN when none).
  double mean_accuracy(std::size_t method) const;
  double mean_accuracy(std::size_t method, std::string_view label_prefix) const;
  double total_train_ms(std::size_t method) const;
  bool complete() const;
};

/// Per batch, methods ranked by accuracy (1 = best, ties share the average
/// rank), averaged over batches. Throws DataError on a failed cell.
std::map<std::string, double> mean_ranks(const ResultsTable& table);
std::map<std::string, double> mean_ranks(std::span<const ResultsTable> tables);

/// CSV with columns: method, one column per batch id, mean_accuracy,
/// total_train_ms. Failed cells are written as "failed".
void write_matrix_csv(const ResultsTable& table, std::ostream& out);
/// CSV with columns: seed, method, batch, scenario, accuracy, time_ms.
void write_long_csv(std::span<const ResultsTable> tables, std::ostream& out);

/// A method under evaluation. predict() is only ever given unlabelled records.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual void learn(const Batch& batch) = 0;
  virtual ClassId predict(const Record& record) const = 0;
};

/// Known method names: adf-isat, adf-sat-only, adf-entropy-only, adf-no-tf,
/// full-retrain.
const std::vector<std::string>& known_methods();
/// ConfigError for an unknown name.
std::unique_ptr<Learner> make_learner(const std::string& method, const AdfParams& params);

using LearnerFactory = std::function<std::unique_ptr<Learner>(const std::string& method)>;

/// Feeds every method the stream in order. For each batch the training set
/// is learned, then the batch's test set is predicted with labels removed;
/// test records are never learned. A failure fills that cell with its error.
ResultsTable run_experiment(std::span<const BatchPair> stream, const std::vector<std::string>& methods,
                            const AdfParams& params, const LearnerFactory& factory = {});

struct MethodComparison {
  std::string method;
  std::size_t wins = 0, losses = 0, ties = 0;
  std::optional<double> z;  // empty when every block tied
  bool significant = false;
  double mean_rank = 0.0;
  double rank_gap = 0.0;  // mean_rank(method) - mean_rank(reference)
  bool rank_significant = false;
};

struct SignificanceReport {
  std::string reference;
  double alpha = 0.025;
  double z_ref = 0.0;
  std::size_t blocks = 0;  // (seed, batch) pairs compared
  double critical_difference = 0.0;
  double reference_rank = 0.0;
  std::vector<MethodComparison> rows;
};

/// Sign test and Nemenyi comparison of every method against `reference`,
/// pooling all tables (each (seed, batch) pair is one block).
SignificanceReport compare_methods(std::span<const ResultsTable> tables, const std::string& reference, double alpha);
void write_report(const SignificanceReport& report, std::ostream& out);

}  // namespace adf

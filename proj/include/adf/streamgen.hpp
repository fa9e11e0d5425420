#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adf/dataset.hpp"
#include "adf/serialize.hpp"

namespace adf {

struct HouseOptions {
  double label_noise = 0.05;
  /// Optional relabelling applied after the rules (and noise): class c
  /// becomes relabel[c]. Empty keeps the rule labels.
  std::vector<ClassId> relabel;
};

/// Synthetic "House" data: 7 numeric attributes x0..x6, 3 categorical
/// attributes c0..c2 and 7 classes (class_1 most frequent .. class_7 least)
/// produced by fixed axis-aligned rules. Odd-ranked classes live in
/// x0 < 57, even-ranked ones in x0 >= 57. Noisy labels are redrawn from the
/// same region so the two class halves stay spatially apart.
Batch generate_house_dataset(std::size_t n, std::uint64_t seed, const HouseOptions& options = {});

/// Records only, appended to an existing House schema (used by drift streams).
std::vector<Record> generate_house_records(const Schema& schema, std::size_t n, std::uint64_t seed,
                                           const HouseOptions& options = {});

SchemaPtr house_schema();

/// Stable hex digest of a dataset's schema and values.
std::string dataset_digest(const Batch& dataset);

struct ManifestEntry {
  std::int64_t batch_id = 0;
  std::string label;  // schedule block, e.g. "MKC-1", "SKC"
  Scenario scenario = Scenario::MKC;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  /// True when a quota had to reuse rows (sampling with replacement).
  bool resampled = false;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct StreamManifest {
  std::uint64_t seed = 0;
  std::string dataset_digest;
  std::size_t train_size = 0;
  bool rearranged = false;
  /// Class halves by label text: the first one is the initially known set.
  std::vector<std::string> first_half;
  std::vector<std::string> second_half;
  std::vector<ManifestEntry> entries;

  friend bool operator==(const StreamManifest&, const StreamManifest&) = default;
};

struct SimulationOptions {
  /// Training rows per batch; 0 picks 1.5% of the dataset (at least 40).
  std::size_t train_size = 0;
  /// Depth of the guide trees whose leaves drive the leaf quotas.
  std::size_t guide_depth = 3;
};

struct BatchPair {
  Batch train;
  Batch test;
  std::string label;
  Scenario scenario = Scenario::MKC;
};

/// 34 batches in the standard schedule: MKC-1 x4, MKC-2 x4, SKC x3, SUC x3,
/// MUC-1 x4, MUC-2 x4, MKUC-1 x4, MKUC-2 x4, MKUC-3 x4.
///
/// Classes are ranked by frequency and dealt alternately into two halves; a
/// single guide tree per half ranks its leaves by support. Each batch's test
/// set is 20% of the batch: half drawn with the batch's own composition, half
/// from rows set aside by the two preceding batches (by batch 1 itself).
StreamManifest simulate_batches(const Batch& dataset, std::uint64_t seed, const SimulationOptions& options = {});

/// 28 batches in the rearranged order MKC-1, MKC-2, MKUC-1, MKUC-2, MUC-1,
/// MUC-2, MKUC-3 (4 each), using the class halves and batch size of
/// `manifest` and fresh draws seeded by `seed`.
StreamManifest rearrange_scenarios(const Batch& dataset, const StreamManifest& manifest, std::uint64_t seed,
                                   const SimulationOptions& options = {});

/// Builds the batches listed in `manifest`. Throws DataError when the
/// dataset digest does not match or a row index is out of range.
std::vector<BatchPair> materialize(const Batch& dataset, const StreamManifest& manifest);

Json to_json(const StreamManifest& m);
StreamManifest manifest_from_json(const Json& j);

struct DriftOptions {
  std::size_t batches = 34;
  std::size_t train_size = 1000;
  /// First batch (1-based) generated under the shifted concept; 0 disables.
  std::size_t shift_batch = 15;
  double label_noise = 0.05;
};

/// Stationary House batches whose labels are permuted (a derangement drawn
/// from `seed`) from `shift_batch` on. Test sets come from the concept of
/// their own batch.
std::vector<BatchPair> drift_stream(std::uint64_t seed, const DriftOptions& options = {});

}  // namespace adf

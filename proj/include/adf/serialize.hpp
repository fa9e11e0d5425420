#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <json.hpp>

#include "adf/controller.hpp"
#include "adf/dataset.hpp"
#include "adf/repair.hpp"
#include "adf/tree.hpp"

namespace adf {

using Json = nlohmann::ordered_json;

Json to_json(const Schema& schema);
Schema schema_from_json(const Json& j);

Json to_json(const InductionParams& p);
InductionParams induction_params_from_json(const Json& j, InductionParams defaults = {});

/// Keys: lambda, theta, epsilon, gamma, trees, mode, split_strategy,
/// min_leaf_size, max_depth, attrs_per_split, seed, temporary_forest.
Json to_json(const AdfParams& p);
/// Reads the keys present in `j` over `defaults`; unknown keys are a ConfigError.
AdfParams adf_params_from_json(const Json& j, AdfParams defaults = {});

Json to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const Json& j);

Json to_json(const Forest& forest);
Forest forest_from_json(const Json& j);

Json to_json(const LeafStatsTable& stats);
LeafStatsTable leaf_stats_from_json(const Json& j);

/// Looks up a batch by id when a checkpoint is restored.
using BatchResolver = std::function<Batch(std::int64_t batch_id)>;

/// Full controller state. Window batches are stored by id only.
Json checkpoint_to_json(const AdfState& state);
AdfState checkpoint_from_json(const Json& j, const BatchResolver& resolve);

/// Canonical text (2-space indent, trailing newline); equal states give
/// byte-identical text.
std::string dump(const Json& j);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
/// Parses JSON text; malformed input is a DataError naming `what`.
Json parse_json(const std::string& text, const std::string& what);

}  // namespace adf

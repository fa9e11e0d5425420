#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adf/controller.hpp"
#include "adf/serialize.hpp"

namespace adf::cli {

enum class ValueKind { Integer, Real, Boolean, Text };

struct OptionSpec {
  std::string key;  // snake_case; the flag is --key-with-dashes, the env var ADF_KEY
  ValueKind kind;
  Json fallback;    // null = unset
  std::string help;
};

/// Option specs for every AdfParams field (defaults are AdfParams defaults;
/// min_leaf_size defaults to null, i.e. picked from the stream size).
std::vector<OptionSpec> param_specs();

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;
EnvLookup process_env();

/// Command options resolved with precedence flags > config file > environment
/// > defaults.
class RunConfig {
 public:
  RunConfig(std::string command, std::vector<OptionSpec> specs);

  /// Registers one flag per option plus --config on `app`.
  void bind(CLI::App& app);

  /// Call after parsing. Throws ConfigError for unknown keys in the config
  /// file or values of the wrong type.
  void resolve(const EnvLookup& env);

  const Json& values() const { return values_; }
  const std::string& command() const { return command_; }
  bool is_set(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;

  /// AdfParams from the param_specs() keys; `stream_rows` picks the default
  /// min_leaf_size (20, or 100 above 100,000 rows) when none was given.
  AdfParams adf_params(std::size_t stream_rows) const;

  /// Resolved values as a document tagged with the command name.
  Json document() const;
  void save(const std::string& dir) const;

 private:
  std::string command_;
  std::vector<OptionSpec> specs_;
  std::map<std::string, std::string> raw_;
  std::map<std::string, CLI::Option*> options_;
  std::string config_path_;
  Json values_ = Json::object();
};

Json convert(const OptionSpec& spec, const std::string& text);

/// "1..5" or "1,2,7" into a list of seeds.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

}  // namespace adf::cli

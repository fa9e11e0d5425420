#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>

#include "adf/error.hpp"

namespace adf::cli {

namespace {

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

std::string env_name(const std::string& key) {
  std::string e = "ADF_" + key;
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return e;
}

std::string kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Integer: return "an integer";
    case ValueKind::Real: return "a number";
    case ValueKind::Boolean: return "true or false";
    case ValueKind::Text: return "text";
  }
  return "?";
}

bool matches(ValueKind kind, const Json& v) {
  switch (kind) {
    case ValueKind::Integer: return v.is_number_integer();
    case ValueKind::Real: return v.is_number();
    case ValueKind::Boolean: return v.is_boolean();
    case ValueKind::Text: return v.is_string();
  }
  return false;
}

}  // namespace

Json convert(const OptionSpec& spec, const std::string& text) {
  auto fail = [&] {
    return ConfigError("option '" + spec.key + "' expects " + kind_name(spec.kind) + ", got '" + text + "'");
  };
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case ValueKind::Integer: {
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw fail();
        return v;
      }
      case ValueKind::Real: {
        const double v = std::stod(text, &used);
        if (used != text.size()) throw fail();
        return v;
      }
      case ValueKind::Boolean:
        if (text == "true" || text == "1" || text == "yes" || text.empty()) return true;
        if (text == "false" || text == "0" || text == "no") return false;
        throw fail();
      case ValueKind::Text: return text;
    }
  } catch (const std::logic_error&) {
    throw fail();
  }
  throw fail();
}

std::vector<OptionSpec> param_specs() {
  const AdfParams d;
  return {
      {"lambda", ValueKind::Integer, d.lambda, "drift threshold: promote the temporary forest once cdf > lambda"},
      {"theta", ValueKind::Real, d.theta, "repairable threshold on the perturbed-leaf ratio"},
      {"epsilon", ValueKind::Real, d.epsilon, "tolerated drop in leaf confidence"},
      {"gamma", ValueKind::Integer, d.gamma, "window size in batches"},
      {"trees", ValueKind::Integer, d.trees, "trees per forest"},
      {"mode", ValueKind::Text, std::string(to_string(d.mode)), "forest style: rf or sysfor"},
      {"split_strategy", ValueKind::Text, std::string(to_string(d.split_strategy)),
       "repair splitting: isat, sat-only or entropy-only"},
      {"min_leaf_size", ValueKind::Integer, nullptr, "minimum records per leaf (default 20, 100 above 100k rows)"},
      {"max_depth", ValueKind::Integer, d.induction.max_depth, "maximum tree depth"},
      {"attrs_per_split", ValueKind::Integer, d.induction.attrs_per_split,
       "candidate attributes per node (0 = automatic)"},
      {"seed", ValueKind::Integer, d.induction.seed, "run seed"},
      {"temporary_forest", ValueKind::Boolean, d.enable_temporary_forest, "keep the window and temporary forest"},
  };
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

RunConfig::RunConfig(std::string command, std::vector<OptionSpec> specs)
    : command_(std::move(command)), specs_(std::move(specs)) {}

void RunConfig::bind(CLI::App& app) {
  app.add_option("--config", config_path_, "JSON file with option values (keys as in the resolved config)");
  for (const auto& s : specs_) {
    std::string help = s.help;
    if (!s.fallback.is_null()) help += " [" + (s.fallback.is_string() ? s.fallback.get<std::string>() : s.fallback.dump()) + "]";
    if (s.kind == ValueKind::Boolean) {
      options_[s.key] = app.add_flag(flag_name(s.key) + "{true}", raw_[s.key], help);
    } else {
      options_[s.key] = app.add_option(flag_name(s.key), raw_[s.key], help);
    }
  }
}

void RunConfig::resolve(const EnvLookup& env) {
  Json file = Json::object();
  if (!config_path_.empty()) {
    try {
      file = parse_json(read_text_file(config_path_), "config file " + config_path_);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    // a saved resolved config can be fed back as is
    if (file.contains("command") && file.contains("options")) file = Json(file["options"]);
    if (!file.is_object()) throw ConfigError("config file options must be a JSON object");
    for (const auto& [k, v] : file.items()) {
      if (std::none_of(specs_.begin(), specs_.end(), [&](const OptionSpec& s) { return s.key == k; })) {
        throw ConfigError("unknown key '" + k + "' in config file");
      }
    }
  }
  values_ = Json::object();
  for (const auto& s : specs_) {
    Json v = s.fallback;
    if (env) {
      if (auto e = env(env_name(s.key))) v = convert(s, *e);
    }
    if (file.contains(s.key)) {
      v = file[s.key];
      if (!v.is_null() && !matches(s.kind, v)) {
        throw ConfigError("config key '" + s.key + "' expects " + kind_name(s.kind));
      }
    }
    auto it = options_.find(s.key);
    if (it != options_.end() && it->second->count() > 0) v = convert(s, raw_.at(s.key));
    values_[s.key] = v;
  }
}

bool RunConfig::is_set(const std::string& key) const { return values_.contains(key) && !values_[key].is_null(); }

std::string RunConfig::text(const std::string& key) const { return is_set(key) ? values_[key].get<std::string>() : ""; }

std::int64_t RunConfig::integer(const std::string& key) const {
  if (!is_set(key)) throw ConfigError("missing value for '" + key + "'");
  return values_[key].get<std::int64_t>();
}

double RunConfig::real(const std::string& key) const {
  if (!is_set(key)) throw ConfigError("missing value for '" + key + "'");
  return values_[key].get<double>();
}

bool RunConfig::boolean(const std::string& key) const { return is_set(key) && values_[key].get<bool>(); }

AdfParams RunConfig::adf_params(std::size_t stream_rows) const {
  Json j = Json::object();
  for (const auto& s : param_specs()) {
    if (is_set(s.key)) j[s.key] = values_[s.key];
  }
  for (const char* k : {"lambda", "gamma", "trees", "min_leaf_size", "max_depth", "attrs_per_split", "seed"}) {
    if (j.contains(k) && j[k].get<std::int64_t>() < 0) throw ConfigError(std::string(k) + " must not be negative");
  }
  if (!j.contains("min_leaf_size")) j["min_leaf_size"] = stream_rows > 100000 ? 100 : 20;
  return adf_params_from_json(j);
}

Json RunConfig::document() const {
  Json d;
  d["command"] = command_;
  d["options"] = values_;
  return d;
}

void RunConfig::save(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  write_text_file((std::filesystem::path(dir) / ("config_" + command_ + ".json")).string(), dump(document()));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    try {
      const unsigned long long v = std::stoull(s, &used);
      if (used == s.size()) return static_cast<std::uint64_t>(v);
    } catch (const std::logic_error&) {
    }
    throw ConfigError("bad seed list '" + text + "'");
  };
  std::vector<std::uint64_t> out;
  for (const auto& part : split_list(text)) {
    if (const auto dots = part.find(".."); dots != std::string::npos) {
      const auto lo = number(part.substr(0, dots)), hi = number(part.substr(dots + 2));
      if (hi < lo || hi - lo > 10000) throw ConfigError("bad seed range '" + part + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(number(part));
    }
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

}  // namespace adf::cli

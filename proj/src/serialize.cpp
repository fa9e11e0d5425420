#include "adf/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "adf/error.hpp"

namespace adf {

namespace {

constexpr int kCheckpointVersion = 1;

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ") + what + ": " + e.what());
  }
}

Json optional_json(const auto& v) { return v ? to_json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const Schema& schema) {
  Json attrs = Json::array();
  for (const auto& a : schema.attributes()) {
    Json ja;
    ja["name"] = a.name;
    ja["kind"] = a.kind == AttributeKind::Numeric ? "numeric" : "categorical";
    if (a.kind == AttributeKind::Categorical) ja["categories"] = a.categories;
    attrs.push_back(std::move(ja));
  }
  Json j;
  j["class_index"] = schema.class_index();
  j["attributes"] = std::move(attrs);
  return j;
}

Schema schema_from_json(const Json& j) {
  return guarded("schema", [&] {
    std::vector<Attribute> attrs;
    for (const auto& ja : j.at("attributes")) {
      Attribute a;
      a.name = ja.at("name").get<std::string>();
      const auto kind = ja.at("kind").get<std::string>();
      if (kind == "numeric") {
        a.kind = AttributeKind::Numeric;
      } else if (kind == "categorical") {
        a.kind = AttributeKind::Categorical;
        a.categories = ja.at("categories").get<std::vector<std::string>>();
      } else {
        throw DataError("unknown attribute kind '" + kind + "'");
      }
      attrs.push_back(std::move(a));
    }
    return Schema(std::move(attrs), j.at("class_index").get<std::size_t>());
  });
}

Json to_json(const InductionParams& p) {
  Json j;
  j["min_leaf_size"] = p.min_leaf_size;
  j["max_depth"] = p.max_depth;
  j["attrs_per_split"] = p.attrs_per_split;
  j["seed"] = p.seed;
  return j;
}

InductionParams induction_params_from_json(const Json& j, InductionParams p) {
  return guarded("induction parameters", [&] {
    if (j.contains("min_leaf_size")) p.min_leaf_size = j["min_leaf_size"].get<std::size_t>();
    if (j.contains("max_depth")) p.max_depth = j["max_depth"].get<std::size_t>();
    if (j.contains("attrs_per_split")) p.attrs_per_split = j["attrs_per_split"].get<std::size_t>();
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    return p;
  });
}

Json to_json(const AdfParams& p) {
  Json j;
  j["lambda"] = p.lambda;
  j["theta"] = p.theta;
  j["epsilon"] = p.epsilon;
  j["gamma"] = p.gamma;
  j["trees"] = p.trees;
  j["mode"] = to_string(p.mode);
  j["split_strategy"] = to_string(p.split_strategy);
  const Json ind = to_json(p.induction);
  for (const auto& [k, v] : ind.items()) j[k] = v;
  j["temporary_forest"] = p.enable_temporary_forest;
  return j;
}

AdfParams adf_params_from_json(const Json& j, AdfParams p) {
  if (!j.is_object()) throw ConfigError("parameters must be a JSON object");
  static const std::set<std::string> known{"lambda",        "theta",     "epsilon",         "gamma",
                                           "trees",         "mode",      "split_strategy",  "min_leaf_size",
                                           "max_depth",     "attrs_per_split", "seed",      "temporary_forest"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("unknown parameter '" + k + "'");
  }
  try {
    if (j.contains("lambda")) p.lambda = j["lambda"].get<std::size_t>();
    if (j.contains("theta")) p.theta = j["theta"].get<double>();
    if (j.contains("epsilon")) p.epsilon = j["epsilon"].get<double>();
    if (j.contains("gamma")) p.gamma = j["gamma"].get<std::size_t>();
    if (j.contains("trees")) p.trees = j["trees"].get<std::size_t>();
    if (j.contains("mode")) p.mode = forest_mode_from_string(j["mode"].get<std::string>());
    if (j.contains("split_strategy")) {
      p.split_strategy = split_strategy_from_string(j["split_strategy"].get<std::string>());
    }
    if (j.contains("temporary_forest")) p.enable_temporary_forest = j["temporary_forest"].get<bool>();
    p.induction = induction_params_from_json(j, p.induction);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad parameter value: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  p.validate();
  return p;
}

Json to_json(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const Node& n : tree.nodes()) {
    Json jn;
    if (n.is_leaf()) {
      jn["leaf"] = n.leaf_id;
      jn["majority"] = n.majority;
      jn["counts"] = n.class_counts;
    } else {
      jn["attr"] = n.test.attr;
      jn["op"] = n.test.kind == SplitTest::Kind::NumericThreshold ? "<=" : "==";
      jn["value"] = n.test.value;
      jn["left"] = n.left;
      jn["right"] = n.right;
    }
    nodes.push_back(std::move(jn));
  }
  Json j;
  j["next_leaf_id"] = tree.next_leaf_id();
  if (const auto& b = tree.bounds()) {
    j["bounds"] = Json{{"attrs", b->attrs}, {"lower", b->lower}, {"upper", b->upper}};
  } else {
    j["bounds"] = nullptr;
  }
  j["nodes"] = std::move(nodes);
  return j;
}

DecisionTree tree_from_json(const Json& j) {
  return guarded("tree", [&] {
    std::vector<Node> nodes;
    for (const auto& jn : j.at("nodes")) {
      Node n;
      if (jn.contains("leaf")) {
        n.leaf_id = jn["leaf"].get<LeafId>();
        n.majority = jn.at("majority").get<ClassId>();
        n.class_counts = jn.at("counts").get<std::vector<Count>>();
      } else {
        const auto op = jn.at("op").get<std::string>();
        if (op != "<=" && op != "==") throw DataError("unknown split operator '" + op + "'");
        n.test.attr = jn.at("attr").get<std::size_t>();
        n.test.kind = op == "<=" ? SplitTest::Kind::NumericThreshold : SplitTest::Kind::CategoricalEquals;
        n.test.value = jn.at("value").get<double>();
        n.left = jn.at("left").get<std::int32_t>();
        n.right = jn.at("right").get<std::int32_t>();
      }
      nodes.push_back(std::move(n));
    }
    std::optional<Aabb> bounds;
    if (const auto& jb = j.at("bounds"); !jb.is_null()) {
      Aabb b;
      b.attrs = jb.at("attrs").get<std::vector<std::size_t>>();
      b.lower = jb.at("lower").get<std::vector<double>>();
      b.upper = jb.at("upper").get<std::vector<double>>();
      if (b.lower.size() != b.attrs.size() || b.upper.size() != b.attrs.size()) {
        throw DataError("tree bounds have inconsistent lengths");
      }
      bounds = std::move(b);
    }
    return DecisionTree::from_parts(std::move(nodes), j.at("next_leaf_id").get<LeafId>(), std::move(bounds));
  });
}

Json to_json(const Forest& forest) {
  Json trees = Json::array();
  for (const auto& t : forest.trees) trees.push_back(to_json(t));
  Json j;
  j["mode"] = to_string(forest.mode);
  j["params"] = to_json(forest.params);
  j["schema"] = to_json(*forest.schema);
  j["trees"] = std::move(trees);
  return j;
}

Forest forest_from_json(const Json& j) {
  return guarded("forest", [&] {
    Forest f;
    f.mode = forest_mode_from_string(j.at("mode").get<std::string>());
    f.params = induction_params_from_json(j.at("params"));
    f.schema = std::make_shared<const Schema>(schema_from_json(j.at("schema")));
    for (const auto& jt : j.at("trees")) f.trees.push_back(tree_from_json(jt));
    return f;
  });
}

Json to_json(const LeafStatsTable& stats) {
  Json rows = Json::array();
  for (const auto& row : stats.trees) {
    Json jr = Json::array();
    for (const auto& s : row) {
      Json js;
      js["leaf"] = s.leaf_id;
      js["support"] = s.support;
      js["confidence"] = s.confidence ? Json(*s.confidence) : Json(nullptr);
      jr.push_back(std::move(js));
    }
    rows.push_back(std::move(jr));
  }
  return rows;
}

LeafStatsTable leaf_stats_from_json(const Json& j) {
  return guarded("leaf statistics", [&] {
    LeafStatsTable t;
    for (const auto& jr : j) {
      auto& row = t.trees.emplace_back();
      for (const auto& js : jr) {
        LeafStat s;
        s.leaf_id = js.at("leaf").get<LeafId>();
        s.support = js.at("support").get<Count>();
        if (!js.at("confidence").is_null()) s.confidence = js["confidence"].get<double>();
        row.push_back(s);
      }
    }
    return t;
  });
}

Json checkpoint_to_json(const AdfState& state) {
  Json window = Json::array();
  for (const auto& b : state.window) window.push_back(b.batch_id);
  Json j;
  j["format"] = "adf-checkpoint";
  j["version"] = kCheckpointVersion;
  j["params"] = to_json(state.params);
  j["batches_seen"] = state.batches_seen;
  j["cdf"] = state.cdf;
  j["last_recommendation"] = to_string(state.last_recommendation);
  j["window"] = std::move(window);
  j["pf"] = optional_json(state.pf);
  j["pf_stats"] = optional_json(state.pf_stats);
  j["af"] = optional_json(state.af);
  j["af_stats"] = optional_json(state.af_stats);
  j["tf"] = optional_json(state.tf);
  j["tf_stats"] = optional_json(state.tf_stats);
  return j;
}

AdfState checkpoint_from_json(const Json& j, const BatchResolver& resolve) {
  return guarded("checkpoint", [&] {
    if (j.value("format", "") != "adf-checkpoint") throw DataError("not a checkpoint document");
    if (j.at("version").get<int>() != kCheckpointVersion) throw DataError("unsupported checkpoint version");
    AdfState s(adf_params_from_json(j.at("params")));
    s.batches_seen = j.at("batches_seen").get<std::size_t>();
    s.cdf = j.at("cdf").get<std::size_t>();
    s.last_recommendation = forest_role_from_string(j.at("last_recommendation").get<std::string>());
    if (!j.at("pf").is_null()) s.pf = forest_from_json(j["pf"]);
    if (!j.at("pf_stats").is_null()) s.pf_stats = leaf_stats_from_json(j["pf_stats"]);
    if (!j.at("af").is_null()) s.af = forest_from_json(j["af"]);
    if (!j.at("af_stats").is_null()) s.af_stats = leaf_stats_from_json(j["af_stats"]);
    if (!j.at("tf").is_null()) s.tf = forest_from_json(j["tf"]);
    if (!j.at("tf_stats").is_null()) s.tf_stats = leaf_stats_from_json(j["tf_stats"]);
    if (s.pf.has_value() != s.pf_stats.has_value() || s.af.has_value() != s.af_stats.has_value() ||
        s.tf.has_value() != s.tf_stats.has_value()) {
      throw InvariantError("checkpoint forests and leaf statistics disagree");
    }
    for (const auto& id : j.at("window")) {
      if (!resolve) throw DataError("checkpoint references window batches but no batch source was given");
      s.window.push_back(resolve(id.get<std::int64_t>()));
    }
    if (s.window.size() > s.params.gamma) throw InvariantError("checkpoint window exceeds gamma");
    return s;
  });
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  // write-then-rename so an interrupted run never leaves a torn file
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw DataError("cannot write '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw DataError("cannot replace '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed " + what + ": " + e.what());
  }
}

}  // namespace adf

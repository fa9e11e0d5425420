// adf: simulate batch streams, learn incrementally, evaluate methods, inspect checkpoints.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adf/controller.hpp"
#include "adf/error.hpp"
#include "adf/evalstat.hpp"
#include "adf/serialize.hpp"
#include "adf/streamgen.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace adf;
using adf::cli::OptionSpec;
using adf::cli::RunConfig;
using adf::cli::ValueKind;

namespace {

constexpr const char* kDatasetFile = "dataset.csv";

struct Stream {
  Batch dataset;
  StreamManifest manifest;
  std::vector<BatchPair> batches;
};

CsvOptions csv_for(const std::string& class_column) {
  CsvOptions o;
  if (!class_column.empty()) o.class_column = class_column;
  return o;
}

// Loads a manifest and the dataset it was drawn from.
Stream open_stream(const std::string& manifest_path, const std::string& data_override) {
  const Json j = parse_json(read_text_file(manifest_path), "manifest " + manifest_path);
  Stream s;
  s.manifest = manifest_from_json(j);
  std::string data = data_override;
  if (data.empty()) {
    data = (fs::path(manifest_path).parent_path() / j.value("dataset_file", std::string(kDatasetFile))).string();
  }
  s.dataset = load_csv(data, csv_for(j.value("class_column", std::string())));
  s.batches = materialize(s.dataset, s.manifest);
  return s;
}

std::string fmt(std::optional<double> v) {
  if (!v) return "-";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << *v;
  return ss.str();
}

double test_accuracy(const AdfState& state, const Batch& test) {
  std::vector<ClassId> pred, truth;
  for (const auto& r : test.records) {
    Record blind = r;
    blind.label.reset();
    pred.push_back(predict(state, blind));
    truth.push_back(*r.label);
  }
  return accuracy(pred, truth);
}

// --- simulate ---------------------------------------------------------------

std::vector<OptionSpec> simulate_specs() {
  return {
      {"input", ValueKind::Text, nullptr, "source CSV (header row required)"},
      {"class_column", ValueKind::Text, nullptr, "class column name (default: last column)"},
      {"house", ValueKind::Integer, nullptr, "generate a synthetic House dataset with this many rows instead"},
      {"house_noise", ValueKind::Real, 0.05, "label noise of the generated House data"},
      {"seed", ValueKind::Integer, 1, "simulation seed"},
      {"rearranged", ValueKind::Boolean, false, "emit the 28-batch rearranged schedule"},
      {"train_size", ValueKind::Integer, 0, "training rows per batch (0 = 1.5% of the dataset)"},
      {"format", ValueKind::Text, "per-batch", "batch files: per-batch or indexed"},
      {"out", ValueKind::Text, "sim", "output directory"},
  };
}

void write_indexed(const std::vector<BatchPair>& batches, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  bool header = true;
  for (const auto& p : batches) {
    for (const auto* part : {&p.train, &p.test}) {
      std::ostringstream ss;
      write_csv(*part, ss);
      std::istringstream lines(ss.str());
      std::string line;
      std::getline(lines, line);
      if (header) {
        out << "batch,split," << line << '\n';
        header = false;
      }
      const char* split = part == &p.train ? "train" : "test";
      while (std::getline(lines, line)) out << p.train.batch_id << ',' << split << ',' << line << '\n';
    }
  }
}

int cmd_simulate(const RunConfig& cfg) {
  const fs::path out = cfg.text("out");
  fs::create_directories(out);
  const std::string class_column = cfg.text("class_column");
  Batch source;
  if (cfg.is_set("input")) {
    source = load_csv(cfg.text("input"), csv_for(class_column));
  } else if (cfg.is_set("house")) {
    if (cfg.integer("house") < 100) throw ConfigError("--house needs at least 100 rows");
    HouseOptions ho;
    ho.label_noise = cfg.real("house_noise");
    source = generate_house_dataset(static_cast<std::size_t>(cfg.integer("house")),
                                    static_cast<std::uint64_t>(cfg.integer("seed")), ho);
  } else {
    throw ConfigError("give --input <csv> or --house <rows>");
  }
  const std::string format = cfg.text("format");
  if (format != "per-batch" && format != "indexed") throw ConfigError("--format must be per-batch or indexed");
  if (cfg.integer("train_size") < 0) throw ConfigError("--train-size must not be negative");

  // Simulate on the dataset as it reads back from disk so later runs see identical rows.
  write_csv(source, (out / kDatasetFile).string());
  const Batch dataset = load_csv((out / kDatasetFile).string(), csv_for(class_column));

  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  SimulationOptions so;
  so.train_size = static_cast<std::size_t>(cfg.integer("train_size"));
  StreamManifest manifest = simulate_batches(dataset, seed, so);
  if (cfg.boolean("rearranged")) manifest = rearrange_scenarios(dataset, manifest, seed, so);

  Json mj = to_json(manifest);
  mj["dataset_file"] = kDatasetFile;
  if (!class_column.empty()) mj["class_column"] = class_column;
  write_text_file((out / "manifest.json").string(), dump(mj));

  const auto batches = materialize(dataset, manifest);
  if (format == "indexed") {
    write_indexed(batches, out / "batches.csv");
  } else {
    fs::create_directories(out / "batches");
    for (const auto& p : batches) {
      std::ostringstream stem;
      stem << "batch_" << std::setw(3) << std::setfill('0') << p.train.batch_id;
      write_csv(p.train, (out / "batches" / (stem.str() + "_train.csv")).string());
      write_csv(p.test, (out / "batches" / (stem.str() + "_test.csv")).string());
    }
  }
  cfg.save(out.string());

  std::cout << "dataset: " << dataset.records.size() << " rows, digest " << manifest.dataset_digest << "\n";
  std::cout << "known half:";
  for (const auto& c : manifest.first_half) std::cout << ' ' << c;
  std::cout << "\nunknown half:";
  for (const auto& c : manifest.second_half) std::cout << ' ' << c;
  std::cout << "\n" << batches.size() << " batches (train " << manifest.train_size << " rows each)\n";
  for (std::size_t i = 0; i < manifest.entries.size();) {
    std::size_t j = i;
    while (j < manifest.entries.size() && manifest.entries[j].label == manifest.entries[i].label) ++j;
    std::cout << "  batches " << std::setw(2) << manifest.entries[i].batch_id << "-" << std::setw(2)
              << manifest.entries[j - 1].batch_id << "  " << manifest.entries[i].label << "\n";
    i = j;
  }
  for (const auto& e : manifest.entries) {
    if (e.resampled) std::cout << "note: batch " << e.batch_id << " reused rows to fill its quota\n";
  }
  return 0;
}

// --- learn ------------------------------------------------------------------

std::vector<OptionSpec> learn_specs() {
  std::vector<OptionSpec> s{
      {"manifest", ValueKind::Text, "sim/manifest.json", "stream manifest"},
      {"data", ValueKind::Text, nullptr, "dataset CSV (default: next to the manifest)"},
      {"out", ValueKind::Text, "run", "output directory (checkpoint, log, resolved config)"},
      {"resume", ValueKind::Text, nullptr, "continue from this checkpoint"},
      {"stop_after", ValueKind::Integer, nullptr, "stop once this many batches have been learned"},
  };
  for (auto& p : cli::param_specs()) s.push_back(std::move(p));
  return s;
}

int cmd_learn(const RunConfig& cfg) {
  const Stream stream = open_stream(cfg.text("manifest"), cfg.text("data"));
  const fs::path out = cfg.text("out");
  fs::create_directories(out);

  auto resolver = [&](std::int64_t id) -> Batch {
    for (const auto& p : stream.batches) {
      if (p.train.batch_id == id) return p.train;
    }
    throw DataError("checkpoint window names batch " + std::to_string(id) + ", which the manifest lacks");
  };

  AdfState state;
  const bool resuming = cfg.is_set("resume");
  if (resuming) {
    state = checkpoint_from_json(parse_json(read_text_file(cfg.text("resume")), "checkpoint"), resolver);
  } else {
    state = AdfState(cfg.adf_params(stream.dataset.records.size()));
  }
  cfg.save(out.string());

  const AdfParams& p = state.params;
  std::cout << "params: theta=" << p.theta << " epsilon=" << p.epsilon << " lambda=" << p.lambda
            << " gamma=" << p.gamma << " trees=" << p.trees << " mode=" << to_string(p.mode)
            << " split_strategy=" << to_string(p.split_strategy) << " min_leaf_size=" << p.induction.min_leaf_size
            << " seed=" << p.induction.seed << "\n";
  if (resuming) std::cout << "resuming after batch " << state.batches_seen << "\n";

  std::ofstream log(out / "learn_log.csv", resuming ? std::ios::app : std::ios::trunc);
  if (!log) throw DataError("cannot write the learn log");
  if (!resuming) log << "batch,label,scenario,pf_ratio,af_ratio,tf_ratio,cdf,recommended,promoted,accuracy\n";

  std::optional<std::size_t> stop;
  if (cfg.is_set("stop_after")) stop = static_cast<std::size_t>(cfg.integer("stop_after"));
  const std::string checkpoint = (out / "checkpoint.json").string();
  for (std::size_t b = state.batches_seen; b < stream.batches.size(); ++b) {
    if (stop && state.batches_seen >= *stop) break;
    const BatchPair& pair = stream.batches[b];
    state = learn_batch(std::move(state), pair.train);
    const double acc = test_accuracy(state, pair.test);
    const StepReport& r = state.last_step;
    std::cout << "batch " << std::setw(2) << pair.train.batch_id << "  " << std::left << std::setw(7) << pair.label
              << std::right << " af_ratio=" << fmt(r.af_ratio) << " tf_ratio=" << fmt(r.tf_ratio)
              << " cdf=" << state.cdf << " recommended=" << to_string(state.last_recommendation)
              << (r.promoted ? " promoted" : "") << " accuracy=" << fmt(acc) << "\n";
    log << pair.train.batch_id << ',' << pair.label << ',' << to_string(pair.scenario) << ',' << fmt(r.pf_ratio) << ','
        << fmt(r.af_ratio) << ',' << fmt(r.tf_ratio) << ',' << state.cdf << ','
        << to_string(state.last_recommendation) << ',' << (r.promoted ? 1 : 0) << ',' << fmt(acc) << '\n';
    log.flush();
    write_text_file(checkpoint, dump(checkpoint_to_json(state)));
  }
  std::cout << "checkpoint: " << checkpoint << " (" << state.batches_seen << " batches)\n";
  return 0;
}

// --- evaluate ---------------------------------------------------------------

std::vector<OptionSpec> evaluate_specs() {
  std::vector<OptionSpec> s{
      {"manifest", ValueKind::Text, "sim/manifest.json", "stream manifest"},
      {"data", ValueKind::Text, nullptr, "dataset CSV (default: next to the manifest)"},
      {"methods", ValueKind::Text, "adf-isat,full-retrain", "comma-separated methods"},
      {"seeds", ValueKind::Text, "1", "seeds, e.g. 1..5 or 1,4,9"},
      {"alpha", ValueKind::Real, 0.025, "significance level: 0.05, 0.025 or 0.01"},
      {"reference", ValueKind::Text, nullptr, "method the others are compared with (default: first)"},
      {"out", ValueKind::Text, "eval", "output directory"},
  };
  for (auto& p : cli::param_specs()) {
    if (p.key != "seed") s.push_back(std::move(p));
  }
  return s;
}

int cmd_evaluate(const RunConfig& cfg) {
  const auto methods = cli::split_list(cfg.text("methods"));
  if (methods.empty()) throw ConfigError("no methods given");
  for (const auto& m : methods) {
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
  const std::string reference = cfg.is_set("reference") ? cfg.text("reference") : methods.front();
  if (std::find(methods.begin(), methods.end(), reference) == methods.end()) {
    throw ConfigError("reference method '" + reference + "' is not among --methods");
  }
  const double alpha = cfg.real("alpha");
  const double z_ref = z_reference(alpha);
  const auto seeds = cli::parse_seed_list(cfg.text("seeds"));

  const Stream stream = open_stream(cfg.text("manifest"), cfg.text("data"));
  const fs::path out = cfg.text("out");
  fs::create_directories(out);
  cfg.save(out.string());
  const AdfParams base = cfg.adf_params(stream.dataset.records.size());

  std::vector<ResultsTable> tables;
  for (auto seed : seeds) {
    AdfParams p = base;
    p.induction.seed = seed;
    tables.push_back(run_experiment(stream.batches, methods, p));
    std::ofstream f(out / ("results_seed" + std::to_string(seed) + ".csv"));
    write_matrix_csv(tables.back(), f);
  }
  {
    std::ofstream f(out / "results_long.csv");
    write_long_csv(tables, f);
  }

  std::cout << "method                 mean_accuracy  train_ms  failed\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    double acc = 0.0, ms = 0.0;
    std::size_t failed = 0;
    for (const auto& t : tables) {
      acc += t.mean_accuracy(m);
      ms += t.total_train_ms(m);
      for (const auto& c : t.cells[m]) failed += c.accuracy ? 0 : 1;
    }
    const double n = static_cast<double>(tables.size());
    std::cout << std::left << std::setw(22) << methods[m] << std::right << std::fixed << std::setprecision(4)
              << std::setw(14) << acc / n << std::setprecision(1) << std::setw(10) << ms / n << std::setw(8) << failed
              << "\n";
  }
  std::cout.unsetf(std::ios::floatfield);

  std::ostringstream report;
  const bool complete = std::all_of(tables.begin(), tables.end(), [](const ResultsTable& t) { return t.complete(); });
  if (methods.size() < 2) {
    report << "one method: no comparison (z_ref " << z_ref << ")\n";
  } else if (!complete) {
    report << "some cells failed: significance tests skipped (z_ref " << z_ref << ")\n";
  } else {
    write_report(compare_methods(tables, reference, alpha), report);
  }
  std::cout << "\n" << report.str();
  write_text_file((out / "report.txt").string(), report.str());
  return 0;
}

// --- inspect ----------------------------------------------------------------

void describe(const char* role, const std::optional<Forest>& f) {
  if (!f) {
    std::cout << role << ": none\n";
    return;
  }
  std::size_t depth = 0;
  for (const auto& t : f->trees) depth = std::max(depth, t.depth());
  std::cout << role << ": " << f->trees.size() << " trees, " << f->leaf_total() << " leaves, max depth " << depth
            << ", " << f->schema->class_count() << " classes\n";
  for (std::size_t k = 0; k < f->trees.size(); ++k) {
    std::cout << "  tree " << k << ": " << f->trees[k].leaf_count() << " leaves, depth " << f->trees[k].depth() << "\n";
  }
}

int cmd_inspect(const std::string& path) {
  const Json j = parse_json(read_text_file(path), "checkpoint " + path);
  // window batches are listed by id only; they are not needed for a summary
  const AdfState s = checkpoint_from_json(j, [](std::int64_t id) { return Batch{nullptr, {}, id, id}; });
  std::cout << "batches learned: " << s.batches_seen << "\ncdf: " << s.cdf
            << "\nrecommended: " << to_string(s.last_recommendation) << "\nwindow:";
  for (const auto& b : s.window) std::cout << ' ' << b.batch_id;
  std::cout << "\nparams: " << to_json(s.params).dump() << "\n";
  describe("PF", s.pf);
  describe("AF", s.af);
  describe("TF", s.tf);
  return 0;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config: return 1;
    case ErrorKind::Data: return 2;
    case ErrorKind::Invariant: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive decision forests for batch streams"};
  app.require_subcommand(1);

  RunConfig simulate("simulate", simulate_specs());
  RunConfig learn("learn", learn_specs());
  RunConfig evaluate("evaluate", evaluate_specs());
  std::string checkpoint_path;

  auto* sim_cmd = app.add_subcommand("simulate", "Cut a dataset into the scenario batch schedule");
  simulate.bind(*sim_cmd);
  auto* learn_cmd = app.add_subcommand("learn", "Learn a stream batch by batch, checkpointing after each");
  learn.bind(*learn_cmd);
  auto* eval_cmd = app.add_subcommand("evaluate", "Compare methods on a stream over several seeds");
  evaluate.bind(*eval_cmd);
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarise a checkpoint");
  inspect_cmd->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    const auto env = cli::process_env();
    if (*sim_cmd) {
      simulate.resolve(env);
      return cmd_simulate(simulate);
    }
    if (*learn_cmd) {
      learn.resolve(env);
      return cmd_learn(learn);
    }
    if (*eval_cmd) {
      evaluate.resolve(env);
      return cmd_evaluate(evaluate);
    }
    return cmd_inspect(checkpoint_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

// ifcm: train, inspect and run interpretable intuitionistic FCM classifiers.
//
// Exit codes: 0 ok, 2 bad input data, 3 training failed, 4 model/input
// mismatch, 5 unreadable or corrupt model.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifcm/error.hpp"
#include "ifcm/inference.hpp"
#include "ifcm/model_io.hpp"
#include "ifcm/pack.hpp"
#include "ifcm/training.hpp"

namespace fs = std::filesystem;
using namespace ifcm;

namespace {

enum Exit { kOk = 0, kInput = 2, kTraining = 3, kMismatch = 4, kModel = 5 };

// Carries an exit code out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string &message) { throw Failure{code, message}; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::optional<std::uint64_t> env_seed() {
  const char *s = std::getenv("IFCM_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char *end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end != '\0') fail(kInput, std::string("IFCM_SEED is not an unsigned integer: ") + s);
  return v;
}

struct Dataset {
  std::vector<ClassSpec> classes;
  std::vector<FeaturePack> packs;
};

Dataset load_dataset(const fs::path &dir, const std::string &manifest) {
  if (!fs::is_directory(dir)) fail(kInput, "data directory not found: " + dir.string());
  Dataset d;
  const fs::path mpath = manifest.empty() ? dir / "classes.txt" : fs::path(manifest);
  try {
    d.classes = read_class_manifest(mpath);
  } catch (const Error &e) {
    fail(kInput, e.what());
  }
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ifp") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(kInput, "no .ifp packs in " + dir.string());
  for (const auto &f : files) {
    try {
      d.packs.push_back(read_pack(f));
    } catch (const Error &e) {
      fail(kInput, e.what());
    }
    if (!d.packs.back().class_id) fail(kInput, f.string() + ": pack has no class id");
  }
  return d;
}

std::vector<LabeledRegions> regions_or_fail(const Dataset &d, const RegionOptions &opts) {
  try {
    return prepare_samples(d.packs, opts);
  } catch (const Error &e) {
    fail(kInput, e.what());
  }
}

IfcmModel load_or_fail(const fs::path &path) {
  try {
    return load_model(path);
  } catch (const Error &e) {
    fail(kModel, e.what());
  }
}

FeaturePack pack_or_fail(const fs::path &path) {
  try {
    return read_pack(path);
  } catch (const Error &e) {
    fail(kInput, e.what());
  }
}

MfShape parse_shape(const std::string &s) { return s == "triangular" ? MfShape::triangular : MfShape::gaussian; }

// Options shared by train and gridsearch.
struct TrainFlags {
  std::string data;
  std::string manifest;
  std::optional<std::size_t> clusters;
  std::optional<std::size_t> sets;
  std::optional<std::string> mf;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> superpixels;
  std::optional<std::size_t> levels;
  std::optional<std::size_t> max_iters;
  std::optional<double> epsilon;
  bool unsustained = false;

  void add(CLI::App &app) {
    app.add_option("data", data, "directory of .ifp packs")->required();
    app.add_option("--manifest", manifest, "class manifest (default <data>/classes.txt)");
    app.add_option("--clusters", clusters, "medoid concepts per class");
    app.add_option("--sets", sets, "fuzzy sets per family (E_b = E_q)");
    app.add_option("--mf", mf, "membership shape")->check(CLI::IsMember({"gaussian", "triangular"}));
    app.add_option("--seed", seed, "training seed (IFCM_SEED overrides)");
    app.add_option("--superpixels", superpixels, "SLIC target when packs carry no labels");
    app.add_option("--levels", levels, "linguistic partition levels")->check(CLI::IsMember({3, 5, 7}));
    app.add_option("--max-iters", max_iters, "reasoning iteration budget");
    app.add_option("--epsilon", epsilon, "reasoning convergence threshold");
    app.add_flag("--unsustained", unsustained, "let input memberships evolve during reasoning");
  }

  TrainingConfig config() const {
    TrainingConfig cfg;
    if (clusters) cfg.clusters_per_class = *clusters;
    if (sets) cfg.e_b = cfg.e_q = *sets;
    if (mf) cfg.mf_shape = parse_shape(*mf);
    if (seed) cfg.seed = *seed;
    if (const auto s = env_seed()) cfg.seed = *s;
    if (superpixels) cfg.regions.superpixels = *superpixels;
    if (levels) cfg.partition_levels = *levels;
    if (max_iters) cfg.reasoning.max_iters = *max_iters;
    if (epsilon) cfg.reasoning.epsilon = *epsilon;
    cfg.sustain_inputs = !unsustained;
    try {
      cfg.validate();
    } catch (const Error &e) {
      fail(kInput, e.what());
    }
    return cfg;
  }
};

void cmd_train(const TrainFlags &flags, const std::string &out) {
  const TrainingConfig cfg = flags.config();
  const Dataset d = load_dataset(flags.data, flags.manifest);
  const auto samples = regions_or_fail(d, cfg.regions);
  IfcmModel model;
  try {
    model = train(samples, d.classes, cfg);
  } catch (const Error &e) {
    fail(kTraining, e.what());
  }
  save_model(out, model);
  std::cout << "model: " << out << '\n'
            << "concepts: " << model.concept_count() << " (" << model.input_count() << " input, "
            << model.classes.size() << " output)\n"
            << "edges: " << model.edges.size() << '\n';
  for (std::size_t m = 0; m < model.input_count(); ++m) {
    std::cout << "  C_" << m + 1 << " " << model.concepts[m].label << ": " << model.libraries[m].pairs.size()
              << " IFS pairs" << (model.libraries[m].scaled ? " (scaled)" : "") << '\n';
  }
  std::cout << "neutral edges: " << model.diagnostics.neutral_edges << '\n'
            << "scaled libraries: " << model.diagnostics.scaled_libraries << '\n';
}

struct Classified {
  IfcmModel model;
  IfcmState state;
  ClassDecision decision;
};

Classified run_classify(const fs::path &model_path, const fs::path &pack_path) {
  Classified c{load_or_fail(model_path), {}, {}};
  const FeaturePack pack = pack_or_fail(pack_path);
  if (pack.features.delta != c.model.feature_dim()) {
    fail(kMismatch, pack_path.string() + ": feature channels " + std::to_string(pack.features.delta) +
                        " do not match the model's " + std::to_string(c.model.feature_dim()));
  }
  std::vector<Vector> regions;
  try {
    regions = extract_regions(pack, c.model.config.regions);
  } catch (const Error &e) {
    fail(kInput, pack_path.string() + ": " + e.what());
  }
  try {
    c.state = build_state_vector(regions, c.model);
  } catch (const DimensionMismatchError &e) {
    fail(kMismatch, e.what());
  }
  c.decision = classify(c.model, c.state);
  return c;
}

void write_trace(const ClassDecision &d, const fs::path &path) { write_file_atomic(path, trace_export(d)); }

void cmd_classify(const std::string &model_path, const std::string &pack_path, bool want_explain,
                  const std::string &trace_out) {
  const Classified c = run_classify(model_path, pack_path);
  const auto &d = c.decision;
  std::cout << "class " << d.predicted << " " << c.model.class_spec(d.predicted).name << '\n';
  std::cout << "iterations " << d.iterations << (d.converged ? " converged" : " not-converged") << '\n';
  for (const auto &o : d.outputs) {
    std::cout << "  " << o.class_id << ' ' << c.model.class_spec(o.class_id).name << " mu=" << num(o.value.mu())
              << " gamma=" << num(o.value.gamma()) << " hesitancy=" << num(o.real_hesitancy) << '\n';
  }
  if (want_explain) std::cout << explain(d, c.state, c.model).text();
  if (!trace_out.empty()) write_trace(d, trace_out);
}

void cmd_inspect(const std::string &model_path) {
  const IfcmModel model = load_or_fail(model_path);
  const LinguisticPartition part = model.partition();
  std::cout << "classes: " << model.classes.size() << '\n';
  for (const auto &c : model.classes) std::cout << "  " << c.id << ' ' << c.name << '\n';
  std::cout << "concepts: " << model.concept_count() << '\n';
  for (std::size_t k = 0; k < model.concept_count(); ++k) {
    const auto &c = model.concepts[k];
    std::cout << "  C_" << k + 1 << ' ' << (c.kind == ConceptKind::input ? "input " : "output") << " class "
              << c.class_id << " \"" << c.label << '"';
    if (c.kind == ConceptKind::input) {
      std::cout << " pairs=" << model.libraries[k].pairs.size() << (model.libraries[k].scaled ? " scaled" : "");
    }
    std::cout << '\n';
  }
  std::cout << "edges: " << model.edges.size() << '\n';
  for (const auto &e : model.edges) {
    std::cout << "  C_" << e.from + 1 << " -> C_" << e.to + 1 << ' '
              << (e.kind == EdgeKind::input_output ? "input-output" : "input-input ") << " <"
              << num(e.weight.mu()) << ", " << num(e.weight.gamma()) << "> hesitancy "
              << num(e.weight.hesitancy()) << ' ' << part.label_for(e.weight.mu());
    if (e.neutral) std::cout << " neutral";
    std::cout << '\n';
  }
  const auto &cfg = model.config;
  std::cout << "config: clusters=" << cfg.clusters_per_class << " e_b=" << cfg.e_b << " e_q=" << cfg.e_q
            << " mf=" << (cfg.mf_shape == MfShape::gaussian ? "gaussian" : "triangular") << " seed=" << cfg.seed
            << " levels=" << cfg.partition_levels << " sustain_inputs=" << (cfg.sustain_inputs ? 1 : 0) << '\n';
  std::cout << "diagnostics: neutral_edges=" << model.diagnostics.neutral_edges
            << " scaled_libraries=" << model.diagnostics.scaled_libraries << '\n';
}

IntRange parse_range(const std::string &s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const auto v = std::stoul(s);
      return {v, v};
    }
    return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
  } catch (const std::exception &) {
    fail(kInput, "bad range '" + s + "', expected N or A:B");
  }
}

void cmd_gridsearch(const TrainFlags &flags, const std::string &clusters, const std::string &sets,
                    std::size_t folds, const std::string &out) {
  const TrainingConfig base = flags.config();
  const IntRange cr = parse_range(clusters);
  const IntRange sr = parse_range(sets);
  const Dataset d = load_dataset(flags.data, flags.manifest);
  const auto samples = regions_or_fail(d, base.regions);
  GridSearchResult result;
  try {
    result = grid_search(samples, d.classes, base, cr, sr, folds);
  } catch (const Error &e) {
    fail(kTraining, e.what());
  }
  nlohmann::json rows = nlohmann::json::array();
  std::cout << "clusters,sets,accuracy,model_size\n";
  for (const auto &r : result.rows) {
    std::cout << r.clusters << ',' << r.sets << ',' << num(r.accuracy) << ',' << r.model_size
              << (r.error.empty() ? "" : ",error: " + r.error) << '\n';
    nlohmann::json row{{"clusters", r.clusters}, {"sets", r.sets}, {"accuracy", r.accuracy}, {"model_size", r.model_size}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  const auto &b = result.best;
  std::cout << "best: clusters=" << b.clusters_per_class << " sets=" << b.e_b << " accuracy="
            << num(result.rows.front().accuracy) << '\n';
  if (!out.empty()) {
    const nlohmann::json doc{
        {"best",
         {{"clusters_per_class", b.clusters_per_class},
          {"e_b", b.e_b},
          {"e_q", b.e_q},
          {"mf_shape", b.mf_shape == MfShape::gaussian ? "gaussian" : "triangular"},
          {"seed", b.seed},
          {"accuracy", result.rows.front().accuracy}}},
        {"folds", folds},
        {"rows", rows}};
    write_file_atomic(out, doc.dump(1) + '\n');
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Interpretable image classification with intuitionistic fuzzy cognitive maps"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  std::string train_out = "model.json";
  auto *train_cmd = app.add_subcommand("train", "train a model from a directory of packs");
  train_flags.add(*train_cmd);
  train_cmd->add_option("-o,--out", train_out, "model file to write");

  std::string model_path, pack_path, trace_out;
  bool want_explain = false;
  auto *classify_cmd = app.add_subcommand("classify", "classify one pack");
  classify_cmd->add_option("model", model_path)->required();
  classify_cmd->add_option("pack", pack_path)->required();
  classify_cmd->add_flag("--explain", want_explain, "print the linguistic explanation");
  classify_cmd->add_option("--trace", trace_out, "write the reasoning trace as CSV");

  auto *trace_cmd = app.add_subcommand("trace", "classify one pack and write its reasoning trace");
  trace_cmd->add_option("model", model_path)->required();
  trace_cmd->add_option("pack", pack_path)->required();
  trace_cmd->add_option("out", trace_out, "CSV file")->required();

  auto *inspect_cmd = app.add_subcommand("inspect", "print a model's concepts, edges and diagnostics");
  inspect_cmd->add_option("model", model_path)->required();

  TrainFlags grid_flags;
  std::string cluster_range = "5:50", set_range = "5:15", grid_out;
  std::size_t folds = 3;
  auto *grid_cmd = app.add_subcommand("gridsearch", "search clusters per class and fuzzy-set counts");
  grid_flags.add(*grid_cmd);
  grid_cmd->add_option("--cluster-range", cluster_range, "A:B or N");
  grid_cmd->add_option("--set-range", set_range, "A:B or N");
  grid_cmd->add_option("--folds", folds)->check(CLI::Range(2, 100));
  grid_cmd->add_option("-o,--out", grid_out, "JSON file for the winning config and table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // --help and friends exit 0; real usage errors share the bad-input code
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (train_cmd->parsed()) cmd_train(train_flags, train_out);
    if (classify_cmd->parsed()) cmd_classify(model_path, pack_path, want_explain, trace_out);
    if (trace_cmd->parsed()) cmd_classify(model_path, pack_path, false, trace_out);
    if (inspect_cmd->parsed()) cmd_inspect(model_path);
    if (grid_cmd->parsed()) cmd_gridsearch(grid_flags, cluster_range, set_range, folds, grid_out);
  } catch (const Failure &f) {
    std::cerr << "ifcm: " << f.message << '\n';
    return f.code;
  } catch (const std::exception &e) {
    std::cerr << "ifcm: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

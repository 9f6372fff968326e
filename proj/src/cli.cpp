#include "seal/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seal/datasynth.hpp"
#include "seal/hierarchy.hpp"
#include "seal/objective.hpp"
#include "seal/parallel.hpp"
#include "seal/rng.hpp"
#include "seal/training.hpp"
#include "seal/transport.hpp"
#include "seal/tree_io.hpp"
#include "seal/version.hpp"

namespace seal::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buffer;
}

void report_validation(const std::string& message,
                       const std::vector<ValidationIssue>& issues) {
  json report;
  report["error"] = "validation";
  report["message"] = message;
  report["issues"] = json::array();
  for (const auto& issue : issues)
    report["issues"].push_back({{"code", issue.code},
                                {"row", issue.row},
                                {"col", issue.col},
                                {"message", issue.message}});
  std::cerr << report.dump() << "\n";
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("json parse error in " + path + ": " + e.what());
  }
  return j;
}

Vec load_vector_json(const std::string& path) {
  const json j = load_json_file(path);
  if (!j.is_array())
    throw ValidationError(path + ": expected a JSON array of numbers");
  return j.get<Vec>();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// distance

struct DistanceArgs {
  std::string tree_path, mu_path, nu_path, mode;
};

int cmd_distance(const DistanceArgs& args) {
  const HierarchySpec spec = load_tree(args.tree_path);
  require_valid(spec);
  const Vec mu = load_vector_json(args.mu_path);
  const Vec nu = load_vector_json(args.nu_path);
  double value = 0.0;
  if (args.mode == "tw") {
    value = tree_wasserstein(spec, mu, nu);
  } else if (args.mode == "rtw") {
    value = relaxed_tree_wasserstein(spec, mu, nu);
  } else {
    throw ValidationError("unknown --mode: " + args.mode);
  }
  char line[64];
  std::snprintf(line, sizeof(line), "%.12f\n", value);
  std::cout << line;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle-check

struct OracleArgs {
  int trees = 200;
  uint64_t seed = 12345;
  int max_nodes = 20;
};

int cmd_oracle_check(const OracleArgs& args, bool quiet) {
  if (args.max_nodes < 3 || args.max_nodes > 32)
    throw ValidationError("--max-nodes must be in [3,32]");
  if (args.trees < 0) throw ValidationError("--trees must be >= 0");
  if (args.trees == 0) {
    if (!quiet)
      std::cerr << "warning: 0 trees requested, the check is vacuous\n";
    std::cout << "oracle-check: trees=0 max discrepancy = 0\nPASS (vacuous)\n";
    return kExitOk;
  }

  Vec discrepancy(args.trees, 0.0);
  parallel_for(args.trees, [&](int t) {
    Rng rng(mix_seed(args.seed, t));
    std::uniform_int_distribution<int> pick_n(3, args.max_nodes);
    const int n = pick_n(rng);
    std::uniform_int_distribution<int> pick_k(2, n - 1);
    const int k = pick_k(rng);

    RandomTreeOptions opts;
    opts.num_observed = k;
    opts.num_latent = n - k;
    opts.unit_weights = false;
    const HierarchySpec spec = random_hierarchy(opts, rng);

    const Vec mu = random_simplex_point(k, rng);
    const Vec nu = random_simplex_point(k, rng);
    const double closed_form = tree_wasserstein(spec, mu, nu);

    const Matrix metric = tree_metric(spec);
    Matrix cost(k, k);
    const int m = spec.num_latent;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) cost(i, j) = metric(m + i, m + j);
    const TransportPlan plan = lp_wasserstein_oracle(cost, mu, nu);
    discrepancy[t] = std::abs(closed_form - plan.cost);
  });

  double worst = 0.0;
  for (double d : discrepancy) worst = std::max(worst, d);
  char line[128];
  std::snprintf(line, sizeof(line),
                "oracle-check: trees=%d max-nodes=%d seed=%llu\n", args.trees,
                args.max_nodes, static_cast<unsigned long long>(args.seed));
  std::cout << line;
  std::snprintf(line, sizeof(line), "max discrepancy = %.3e\n", worst);
  std::cout << line;
  const bool pass = worst <= 1e-9;
  std::cout << (pass ? "PASS" : "FAIL") << " (tolerance 1e-9)\n";
  return pass ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config_path;
  std::string train_csv;
  std::string test_csv;
  std::string tree_path;
  std::string manifest_path;
  std::string mode = "supervised";
  std::string out_dir;
  int labels_per_class = 0;  // 0 = keep everything labeled
  int latent = 0;            // > 0: generate a random soft prior tree
  int tree_depth = 0;
  uint64_t tree_seed = 0;
  bool tree_seed_given = false;
  double root_mass_scale = 1.0;
  bool seed_given = false;
  uint64_t seed_override = 0;
};

// Re-map labels of `data` (indexed by its own class_names) onto `reference`
// name order so train and test files agree on indices.
Dataset remap_labels(const CsvData& data,
                     const std::vector<std::string>& reference) {
  Dataset out = data.data;
  for (int i = 0; i < out.size(); ++i) {
    const std::string& name = data.class_names[out.labels[i]];
    const auto found = std::find(reference.begin(), reference.end(), name);
    if (found == reference.end())
      throw ValidationError("label \"" + name +
                            "\" does not appear in the training data");
    out.labels[i] = static_cast<int>(found - reference.begin());
  }
  return out;
}

int cmd_train(TrainArgs args, bool quiet) {
  json manifest;
  TrainConfig config;
  HierarchySpec spec;

  if (!args.manifest_path.empty()) {
    // Re-run: everything (config, paths, initial tree) comes resolved from
    // the manifest, which is what makes the re-run bitwise reproducible.
    manifest = load_json_file(args.manifest_path);
    config = config_from_json(manifest.at("config"));
    args.mode = manifest.at("mode").get<std::string>();
    args.train_csv = manifest.at("train_csv").get<std::string>();
    args.test_csv = manifest.value("test_csv", std::string());
    args.labels_per_class = manifest.value("labels_per_class", 0);
    spec = tree_from_json(manifest.at("initial_tree"));
  } else {
    if (args.config_path.empty())
      throw ValidationError("train: --config (or --manifest) is required");
    if (args.train_csv.empty())
      throw ValidationError("train: --train is required");
    config = config_from_json(load_json_file(args.config_path));
  }
  if (args.seed_given) config.seed = args.seed_override;

  const TrainMode mode = train_mode_from_string(args.mode);
  {
    const std::vector<std::string> violations = config.validate(mode);
    if (!violations.empty()) {
      std::vector<ValidationIssue> issues;
      for (const auto& v : violations) issues.push_back({"config", -1, -1, v});
      throw ValidationError("invalid train config", issues);
    }
  }

  const CsvData train_csv = load_csv(args.train_csv);
  SplitDataset dataset;
  dataset.labeled = train_csv.data;
  dataset.class_names = train_csv.class_names;
  if (!args.test_csv.empty())
    dataset.test = remap_labels(load_csv(args.test_csv), dataset.class_names);
  if (args.labels_per_class > 0)
    dataset = split_labeled(dataset, args.labels_per_class,
                            mix_seed(config.seed, 100));

  if (spec.total_nodes() == 0) {
    if (!args.tree_path.empty()) {
      spec = load_tree(args.tree_path);
    } else if (args.latent > 0) {
      RandomTreeOptions opts;
      opts.num_observed = dataset.num_classes();
      opts.num_latent = args.latent;
      opts.soft = true;
      opts.max_depth = args.tree_depth;
      opts.root_mass_scale = args.root_mass_scale;
      Rng tree_rng(args.tree_seed_given ? args.tree_seed
                                        : mix_seed(config.seed, 7));
      spec = random_hierarchy(opts, tree_rng);
      spec.observed_names = dataset.class_names;
    } else {
      throw ValidationError("train: provide --tree or --latent");
    }
  }
  if (spec.observed_names.empty()) spec.observed_names = dataset.class_names;
  require_valid(spec);

  if (args.out_dir.empty()) throw ValidationError("train: --out is required");
  fs::create_directories(args.out_dir);
  const std::string manifest_path = args.out_dir + "/manifest.json";
  const std::string metrics_path = args.out_dir + "/metrics.jsonl";
  const std::string checkpoint_path = args.out_dir + "/checkpoint.json";

  manifest = json{{"library_version", kVersion},
                  {"mode", args.mode},
                  {"config", config_to_json(config)},
                  {"train_csv", args.train_csv},
                  {"test_csv", args.test_csv},
                  {"labels_per_class", args.labels_per_class},
                  {"initial_tree", tree_to_json(spec)},
                  {"started_at", iso_timestamp()}};
  write_text(manifest_path, manifest.dump(2) + "\n");

  std::ofstream metrics(metrics_path);
  if (!metrics) throw std::runtime_error("cannot write " + metrics_path);
  metrics.precision(17);
  const int progress_every = std::max(1, config.steps / 10);
  const MetricsSink sink = [&](const StepMetrics& m) {
    json line = {{"step", m.step},
                 {"lr", m.lr},
                 {"ce", m.ce},
                 {"psi", m.psi},
                 {"phi", m.phi},
                 {"accuracy", m.accuracy},
                 {"retained_fraction", m.retained_fraction}};
    metrics << line.dump() << "\n";
    if (!quiet && (m.step + 1) % progress_every == 0)
      std::cerr << "step " << m.step + 1 << "/" << config.steps
                << " ce=" << m.ce << "\n";
  };

  const TrainResult result = run_training(dataset, spec, config, mode, sink);

  json checkpoint = {{"library_version", kVersion},
                     {"step", config.steps},
                     {"model", model_to_json(result.model)},
                     {"hierarchy", tree_to_json(result.spec)}};
  write_text(checkpoint_path, checkpoint.dump(2) + "\n");

  json summary = {{"steps", config.steps}};
  if (!dataset.test.empty()) {
    const EvalResult eval =
        evaluate(result.model, dataset.test, dataset.num_classes());
    summary["test_accuracy"] = eval.accuracy;
    summary["test_mean_ce"] = eval.mean_ce;
  }
  manifest["finished_at"] = iso_timestamp();
  write_text(manifest_path, manifest.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract-tree

int cmd_extract_tree(const std::string& checkpoint_path,
                     const std::string& out_path) {
  const json checkpoint = load_json_file(checkpoint_path);
  if (!checkpoint.contains("hierarchy"))
    throw ValidationError("checkpoint has no \"hierarchy\" field");
  const HierarchySpec spec = tree_from_json(checkpoint.at("hierarchy"));
  require_valid(spec);
  const HierarchySpec hard = harden(spec);
  require_valid(hard);
  write_text(out_path, tree_to_dot(hard));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// knn

struct KnnArgs {
  std::string tree_path, train_csv, query_csv, out_path;
  int k = 1;
};

// Query rows may or may not carry a label column; labels are ignored.
std::vector<Vec> load_query_csv(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw CsvError("io_failure", "cannot open " + path);
  std::string header;
  if (!std::getline(probe, header))
    throw CsvError("empty_file", path + " is empty");
  probe.close();

  if (header.find("label") != std::string::npos) {
    const CsvData data = load_csv(path);
    return data.data.features;
  }
  // All-numeric file: reuse the parser by appending a dummy label column.
  std::ifstream in(path);
  std::vector<Vec> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 || line.empty()) continue;
    Vec row;
    std::istringstream stream(line);
    std::string field;
    int column = 0;
    while (std::getline(stream, field, ',')) {
      ++column;
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw CsvError("non_numeric_feature",
                       path + ":" + std::to_string(line_number) + ": column " +
                           std::to_string(column) + " is not numeric",
                       line_number, column);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_knn(const KnnArgs& args) {
  if (args.k < 1) throw ValidationError("--k must be >= 1");
  const HierarchySpec spec = load_tree(args.tree_path);
  require_valid(spec);

  const CsvData train = load_csv(args.train_csv);
  if (train.data.empty()) throw ValidationError("knn: empty training set");
  if (args.k > train.data.size())
    throw ValidationError("knn: k=" + std::to_string(args.k) +
                          " exceeds training size " +
                          std::to_string(train.data.size()));

  std::vector<std::pair<Vec, int>> train_pairs;
  train_pairs.reserve(train.data.size());
  for (int i = 0; i < train.data.size(); ++i) {
    require_prob_vector(train.data.features[i],
                        "train row " + std::to_string(i + 2));
    train_pairs.emplace_back(train.data.features[i], train.data.labels[i]);
  }

  const std::vector<Vec> queries = load_query_csv(args.query_csv);
  const RtwEvaluator evaluator(spec);
  std::ostringstream out;
  out << "predicted_label\n";
  for (size_t q = 0; q < queries.size(); ++q) {
    require_prob_vector(queries[q], "query row " + std::to_string(q + 2));
    const int label = rtw_knn(evaluator, train_pairs, queries[q], args.k);
    out << train.class_names[label] << "\n";
  }
  if (args.out_path.empty())
    std::cout << out.str();
  else
    write_text(args.out_path, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
  SyntheticSpec spec;
  std::string out_dir;
};

int cmd_gen_data(const GenDataArgs& args) {
  if (args.out_dir.empty()) throw ValidationError("gen-data: --out is required");
  const SplitDataset dataset = generate(args.spec);
  fs::create_directories(args.out_dir);
  save_csv(dataset.labeled, dataset.class_names, args.out_dir + "/train.csv");
  save_csv(dataset.test, dataset.class_names, args.out_dir + "/test.csv");
  json manifest = {{"library_version", kVersion},
                   {"synthetic_spec", synthetic_spec_to_json(args.spec)},
                   {"class_names", dataset.class_names},
                   {"supercluster_of_class", dataset.supercluster_of_class}};
  write_text(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::cout << json({{"train_rows", dataset.labeled.size()},
                     {"test_rows", dataset.test.size()},
                     {"classes", dataset.num_classes()}})
                   .dump()
            << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"SEAL: tree-Wasserstein distances and joint label-hierarchy learning"};
  app.fallthrough(true);

  uint64_t global_seed = 0;
  bool quiet = false;
  std::string global_out;
  auto* seed_opt = app.add_option("--seed", global_seed, "Seed override");
  app.add_flag("--quiet", quiet, "Suppress progress output on stderr");
  app.add_option("--out", global_out, "Output path/directory");

  DistanceArgs distance_args;
  auto* distance = app.add_subcommand("distance",
                                      "Tree-Wasserstein distance between two "
                                      "measures on a tree's leaves");
  distance->add_option("tree", distance_args.tree_path, "Tree JSON")->required();
  distance->add_option("mu", distance_args.mu_path, "First measure (JSON array)")
      ->required();
  distance->add_option("nu", distance_args.nu_path, "Second measure (JSON array)")
      ->required();
  distance->add_option("--mode", distance_args.mode, "tw | rtw")->required();

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand(
      "oracle-check", "Closed form vs exact LP agreement over random trees");
  oracle->add_option("--trees", oracle_args.trees, "Number of random trees");
  oracle->add_option("--max-nodes", oracle_args.max_nodes, "Max nodes per tree");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a classifier with SEAL");
  train->add_option("--config", train_args.config_path, "Train config JSON");
  train->add_option("--train", train_args.train_csv, "Training CSV");
  train->add_option("--test", train_args.test_csv, "Test CSV");
  train->add_option("--labels-per-class", train_args.labels_per_class,
                    "Keep this many labeled samples per class");
  train->add_option("--mode", train_args.mode, "supervised | semisup");
  train->add_option("--tree", train_args.tree_path, "Initial hierarchy JSON");
  train->add_option("--latent", train_args.latent,
                    "Generate a random soft prior with this many latent nodes");
  train->add_option("--tree-depth", train_args.tree_depth,
                    "Depth cap for the generated prior (0 = none)");
  auto* tree_seed_opt =
      train->add_option("--tree-seed", train_args.tree_seed,
                        "Seed for the generated prior");
  train->add_option("--root-mass-scale", train_args.root_mass_scale,
                    "Damping for root-row mass in the generated soft prior");
  train->add_option("--manifest", train_args.manifest_path,
                    "Re-run from a previous run's manifest");

  std::string extract_checkpoint;
  auto* extract = app.add_subcommand(
      "extract-tree", "Harden a checkpoint's hierarchy and export DOT");
  extract->add_option("checkpoint", extract_checkpoint, "Checkpoint JSON")
      ->required();

  KnnArgs knn_args;
  auto* knn = app.add_subcommand("knn",
                                 "k-nearest-neighbor classification in "
                                 "relaxed tree-Wasserstein space");
  knn->add_option("tree", knn_args.tree_path, "Tree JSON")->required();
  knn->add_option("train", knn_args.train_csv, "Training CSV")->required();
  knn->add_option("query", knn_args.query_csv, "Query CSV")->required();
  knn->add_option("--k", knn_args.k, "Neighbor count")->required();

  GenDataArgs gen_args;
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen->add_option("--superclusters", gen_args.spec.num_superclusters);
  gen->add_option("--classes-per-cluster", gen_args.spec.classes_per_cluster);
  gen->add_option("--dim", gen_args.spec.feature_dim);
  gen->add_option("--samples-per-class", gen_args.spec.samples_per_class);
  gen->add_option("--sigma", gen_args.spec.sigma_class);
  gen->add_option("--delta", gen_args.spec.delta);

  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*distance) return cmd_distance(distance_args);
    if (*oracle) {
      if (seed_opt->count()) oracle_args.seed = global_seed;
      return cmd_oracle_check(oracle_args, quiet);
    }
    if (*train) {
      train_args.out_dir = global_out;
      train_args.seed_given = seed_opt->count() > 0;
      train_args.seed_override = global_seed;
      train_args.tree_seed_given = tree_seed_opt->count() > 0;
      return cmd_train(train_args, quiet);
    }
    if (*extract) {
      if (global_out.empty())
        throw ValidationError("extract-tree: --out is required");
      return cmd_extract_tree(extract_checkpoint, global_out);
    }
    if (*knn) {
      knn_args.out_path = global_out;
      return cmd_knn(knn_args);
    }
    if (*gen) {
      if (seed_opt->count()) gen_args.spec.seed = global_seed;
      gen_args.out_dir = global_out;
      return cmd_gen_data(gen_args);
    }
  } catch (const ValidationError& e) {
    report_validation(e.what(), e.issues());
    return kExitValidation;
  } catch (const CsvError& e) {
    json report = {{"error", "csv"},
                   {"code", e.code()},
                   {"message", e.what()},
                   {"line", e.line()},
                   {"column", e.column()}};
    std::cerr << report.dump() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    json report = {{"error", "runtime"}, {"message", e.what()}};
    std::cerr << report.dump() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace seal::cli

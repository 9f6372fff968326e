#include "seal/datasynth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "seal/rng.hpp"

namespace seal {

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec) {
  return {{"num_superclusters", spec.num_superclusters},
          {"classes_per_cluster", spec.classes_per_cluster},
          {"feature_dim", spec.feature_dim},
          {"samples_per_class", spec.samples_per_class},
          {"sigma_class", spec.sigma_class},
          {"delta", spec.delta},
          {"seed", spec.seed}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec spec;
  spec.num_superclusters = j.value("num_superclusters", spec.num_superclusters);
  spec.classes_per_cluster =
      j.value("classes_per_cluster", spec.classes_per_cluster);
  spec.feature_dim = j.value("feature_dim", spec.feature_dim);
  spec.samples_per_class = j.value("samples_per_class", spec.samples_per_class);
  spec.sigma_class = j.value("sigma_class", spec.sigma_class);
  spec.delta = j.value("delta", spec.delta);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

namespace {

void validate_spec(const SyntheticSpec& spec) {
  std::vector<ValidationIssue> issues;
  auto positive = [&](int value, const char* name) {
    if (value <= 0)
      issues.push_back({"config", -1, -1,
                        std::string(name) + " must be positive"});
  };
  positive(spec.num_superclusters, "num_superclusters");
  positive(spec.classes_per_cluster, "classes_per_cluster");
  positive(spec.feature_dim, "feature_dim");
  positive(spec.samples_per_class, "samples_per_class");
  if (spec.sigma_class < 0.0)
    issues.push_back({"config", -1, -1, "sigma_class must be >= 0"});
  if (spec.delta < 0.0)
    issues.push_back({"config", -1, -1, "delta must be >= 0"});
  if (!issues.empty())
    throw ValidationError("invalid synthetic spec", issues);
}

std::vector<Vec> draw_cluster_centers(const SyntheticSpec& spec, Rng& rng) {
  // Rejection sampling with a widening envelope until all pairwise
  // distances clear delta.
  std::vector<Vec> centers;
  double scale = 2.0 * std::max(spec.delta, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int attempts = 0;
  while (static_cast<int>(centers.size()) < spec.num_superclusters) {
    Vec candidate(spec.feature_dim);
    for (double& x : candidate) x = scale * gauss(rng);
    bool far_enough = true;
    for (const Vec& existing : centers) {
      double dist2 = 0.0;
      for (int d = 0; d < spec.feature_dim; ++d) {
        const double diff = candidate[d] - existing[d];
        dist2 += diff * diff;
      }
      if (dist2 < spec.delta * spec.delta) {
        far_enough = false;
        break;
      }
    }
    if (far_enough) {
      centers.push_back(std::move(candidate));
    } else if (++attempts % 100 == 0) {
      scale *= 1.5;
    }
  }
  return centers;
}

Vec random_unit_vector(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace

SplitDataset generate(const SyntheticSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::vector<Vec> cluster_centers = draw_cluster_centers(spec, rng);

  SplitDataset out;
  std::vector<Vec> class_centers;
  const double class_radius = spec.delta / 4.0;
  for (int c = 0; c < spec.num_superclusters; ++c) {
    // Class centers sit on a delta/4 shell around the cluster center and
    // keep pairwise distance >= delta/4 (best effort), so classes inside a
    // cluster stay mutually closer than any cross-cluster pair.
    std::vector<Vec> directions;
    for (int k = 0; k < spec.classes_per_cluster; ++k) {
      Vec dir;
      for (int attempt = 0; attempt < 200; ++attempt) {
        dir = random_unit_vector(spec.feature_dim, rng);
        bool spread = true;
        for (const Vec& other : directions) {
          double dist2 = 0.0;
          for (int d = 0; d < spec.feature_dim; ++d) {
            const double diff = dir[d] - other[d];
            dist2 += diff * diff;
          }
          if (dist2 < 1.0) spread = false;  // closer than 60 degrees
        }
        if (spread) break;
      }
      directions.push_back(dir);
    }
    for (int k = 0; k < spec.classes_per_cluster; ++k) {
      Vec center = cluster_centers[c];
      for (int d = 0; d < spec.feature_dim; ++d)
        center[d] += class_radius * directions[k][d];
      class_centers.push_back(std::move(center));
      out.class_names.push_back("c" + std::to_string(c) + "_" +
                                std::to_string(k));
      out.supercluster_of_class.push_back(c);
    }
  }

  auto sample_around = [&](const Vec& center) {
    Vec x = center;
    for (int d = 0; d < spec.feature_dim; ++d)
      x[d] += spec.sigma_class * gauss(rng);
    return x;
  };

  const int num_classes = spec.num_classes();
  const int test_per_class = (spec.samples_per_class + 3) / 4;
  for (int cls = 0; cls < num_classes; ++cls)
    for (int i = 0; i < spec.samples_per_class; ++i) {
      out.labeled.features.push_back(sample_around(class_centers[cls]));
      out.labeled.labels.push_back(cls);
    }
  for (int cls = 0; cls < num_classes; ++cls)
    for (int i = 0; i < test_per_class; ++i) {
      out.test.features.push_back(sample_around(class_centers[cls]));
      out.test.labels.push_back(cls);
    }
  return out;
}

SplitDataset split_labeled(const SplitDataset& dataset, int labels_per_class,
                           uint64_t seed) {
  const int num_classes = dataset.num_classes();
  std::vector<std::vector<int>> by_class(num_classes);
  for (int i = 0; i < dataset.labeled.size(); ++i)
    by_class[dataset.labeled.labels[i]].push_back(i);
  for (int i = 0; i < dataset.unlabeled.size(); ++i)
    by_class[dataset.unlabeled.labels[i]].push_back(-1 - i);

  SplitDataset out = dataset;
  out.labeled = Dataset{};
  out.unlabeled = Dataset{};

  Rng rng(seed);
  for (int cls = 0; cls < num_classes; ++cls) {
    auto& pool = by_class[cls];
    if (static_cast<int>(pool.size()) < labels_per_class)
      throw ValidationError(
          "split_labeled: class " + std::to_string(cls) + " has only " +
          std::to_string(pool.size()) + " samples, needs " +
          std::to_string(labels_per_class));
    std::shuffle(pool.begin(), pool.end(), rng);
    for (size_t t = 0; t < pool.size(); ++t) {
      const int key = pool[t];
      const Vec& x = key >= 0 ? dataset.labeled.features[key]
                              : dataset.unlabeled.features[-1 - key];
      Dataset& dest = static_cast<int>(t) < labels_per_class ? out.labeled
                                                             : out.unlabeled;
      dest.features.push_back(x);
      dest.labels.push_back(cls);
    }
  }
  return out;
}

CsvData load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("io_failure", "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw CsvError("empty_file", path + " is empty");

  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(s);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!s.empty() && s.back() == ',') fields.push_back("");
    return fields;
  };

  const std::vector<std::string> header = split(line);
  int label_column = -1;
  for (size_t c = 0; c < header.size(); ++c)
    if (header[c] == "label") label_column = static_cast<int>(c);
  if (label_column < 0)
    throw CsvError("missing_label_column",
                   path + ": header has no \"label\" column", 1);

  CsvData out;
  std::vector<std::string> label_names;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      throw CsvError("bad_row",
                     path + ":" + std::to_string(line_number) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()),
                     line_number);
    Vec features;
    features.reserve(header.size() - 1);
    std::string label_text;
    for (size_t c = 0; c < fields.size(); ++c) {
      if (static_cast<int>(c) == label_column) {
        label_text = fields[c];
        continue;
      }
      try {
        size_t consumed = 0;
        const double value = std::stod(fields[c], &consumed);
        if (consumed != fields[c].size()) throw std::invalid_argument("trail");
        features.push_back(value);
      } catch (const std::exception&) {
        throw CsvError("non_numeric_feature",
                       path + ":" + std::to_string(line_number) + ": column " +
                           std::to_string(c + 1) + " (\"" + header[c] +
                           "\") is not numeric: \"" + fields[c] + "\"",
                       line_number, static_cast<int>(c + 1));
      }
    }
    auto found = std::find(label_names.begin(), label_names.end(), label_text);
    int label = static_cast<int>(found - label_names.begin());
    if (found == label_names.end()) label_names.push_back(label_text);
    out.data.features.push_back(std::move(features));
    out.data.labels.push_back(label);
  }
  out.class_names = std::move(label_names);
  return out;
}

void save_csv(const Dataset& data, const std::vector<std::string>& class_names,
              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError("io_failure", "cannot write " + path);
  const int dim = data.empty() ? 0 : static_cast<int>(data.features[0].size());
  for (int d = 0; d < dim; ++d) out << "feature_" << d << ",";
  out << "label\n";
  out << std::setprecision(17);
  for (int i = 0; i < data.size(); ++i) {
    for (int d = 0; d < dim; ++d) out << data.features[i][d] << ",";
    out << class_names[data.labels[i]] << "\n";
  }
}

}  // namespace seal

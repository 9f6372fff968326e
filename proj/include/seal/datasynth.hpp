#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "seal/errors.hpp"
#include "seal/matrix.hpp"

namespace seal {

// Gaussian class blobs arranged in superclusters, the stand-in for
// hierarchically structured image classes. Supercluster centers keep mutual
// distance >= delta; class centers sit on a delta/4 shell around their
// supercluster center with pairwise separation >= delta/4 (best effort);
// samples are N(class center, sigma_class^2 I).
struct SyntheticSpec {
  int num_superclusters = 2;
  int classes_per_cluster = 3;
  int feature_dim = 8;
  int samples_per_class = 200;
  double sigma_class = 1.0;
  double delta = 10.0;
  uint64_t seed = 1;

  int num_classes() const { return num_superclusters * classes_per_cluster; }
};

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

struct Dataset {
  std::vector<Vec> features;
  std::vector<int> labels;

  int size() const { return static_cast<int>(features.size()); }
  bool empty() const { return features.empty(); }
};

struct SplitDataset {
  Dataset labeled;
  Dataset unlabeled;
  Dataset test;
  std::vector<std::string> class_names;
  std::vector<int> supercluster_of_class;  // empty for loaded data

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Deterministic per seed. The full training pool starts out labeled; the
// test set is a fresh draw of ceil(samples_per_class / 4) per class.
SplitDataset generate(const SyntheticSpec& spec);

// Class-balanced labeled/unlabeled split: exactly labels_per_class labeled
// samples per class, drawn without replacement; the rest become unlabeled.
SplitDataset split_labeled(const SplitDataset& dataset, int labels_per_class,
                           uint64_t seed);

// CSV schema: feature_0,...,feature_{d-1},label. Labels are indexed by
// first appearance. Malformed input raises CsvError with 1-based line and
// column positions.
struct CsvData {
  Dataset data;
  std::vector<std::string> class_names;
};

CsvData load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::vector<std::string>& class_names,
              const std::string& path);

}  // namespace seal

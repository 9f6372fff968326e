#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seal/datasynth.hpp"
#include "seal/hierarchy.hpp"
#include "seal/matrix.hpp"
#include "seal/objective.hpp"
#include "seal/rng.hpp"

namespace seal {

// ---------------------------------------------------------------------------
// Model

// Softmax classifier with manual gradients. hidden_dim = 0 gives the plain
// linear model; hidden_dim > 0 inserts one tanh layer (flag-selected, same
// training loop).
struct LinearModel {
  int feature_dim = 0;
  int num_classes = 0;
  int hidden_dim = 0;
  Matrix w_out;      // num_classes x (hidden_dim ? hidden_dim : feature_dim)
  Vec b_out;         // num_classes
  Matrix w_hidden;   // hidden_dim x feature_dim (empty when hidden_dim == 0)
  Vec b_hidden;      // hidden_dim

  // Linear models start at zero (deterministic, no rng draw); the hidden
  // layer gets a uniform Xavier init to break symmetry.
  static LinearModel make(int feature_dim, int num_classes, int hidden_dim,
                          Rng& rng);

  Vec logits(const Vec& x) const;
  // Softmax of logits, stabilized by max subtraction.
  Vec forward(const Vec& x) const;
};

nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Config

enum class TrainMode { kSupervised, kSemiSupervised };
enum class LrSchedule { kCosine, kConstant };

TrainMode train_mode_from_string(const std::string& name);
std::string to_string(TrainMode mode);

struct TrainConfig {
  double lambda = 0.003;  // SEAL coefficient
  double gamma = 1.0;     // consistency coefficient
  double tau = 0.95;      // pseudo-label confidence threshold
  int mu_ratio = 7;       // unlabeled-to-labeled batch ratio
  int batch_size = 64;
  int steps = 1000;
  double lr0 = 0.03;
  double momentum = 0.9;
  LrSchedule lr_schedule = LrSchedule::kCosine;
  double a2_step_size = 0.01;
  uint64_t seed = 1;
  HierarchyUpdate hierarchy_update = HierarchyUpdate::kPgd;
  double sigma_weak = 0.05;
  double sigma_strong = 0.2;
  double dropout_strong = 0.1;
  int hidden_dim = 0;
  // Whether the labeled term also carries the SEAL regularizer during
  // semi-supervised training (the supervised objective always does).
  bool seal_on_labeled = true;

  // All violations at once; empty means valid. The sigma ordering rule only
  // applies to semi-supervised runs (supervised never augments).
  std::vector<std::string> validate(TrainMode mode) const;
};

nlohmann::json config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const nlohmann::json& j);

// Cosine decay lr0 * cos(7*pi/16 * step/steps); constant schedule returns lr0.
double scheduled_lr(const TrainConfig& config, int step);

// ---------------------------------------------------------------------------
// Losses

double cross_entropy(const Vec& prediction, int target);
// CE against the smoothed target (1 - alpha) * onehot + alpha / K.
double label_smoothing_ce(const Vec& prediction, int target, double alpha);

// ---------------------------------------------------------------------------
// Augmentation and pseudo-labeling

enum class AugmentKind { kWeak, kStrong };

// weak: x + N(0, sigma_weak^2); strong: x + N(0, sigma_strong^2) followed by
// independent feature zeroing with probability dropout_strong.
Vec augment(const Vec& x, AugmentKind kind, const TrainConfig& config,
            Rng& rng);

struct PseudoBatch {
  std::vector<uint8_t> retained;  // mask over the unlabeled batch
  std::vector<int> labels;        // argmax labels (valid where retained)
  int retained_count = 0;
  double retained_fraction = 0.0;
};

// Retains a view iff its max weak-view confidence reaches tau; argmax ties
// go to the lowest class index. Targets are constants (no gradient flows
// back through the weak view).
PseudoBatch pseudo_label(const LinearModel& model,
                         const std::vector<Vec>& weak_views, double tau);

// ---------------------------------------------------------------------------
// Steps

struct SgdState {
  Matrix vw_out;
  Vec vb_out;
  Matrix vw_hidden;
  Vec vb_hidden;

  static SgdState zeros_like(const LinearModel& model);
};

struct LossBreakdown {
  double ce = 0.0;            // mean labeled cross-entropy
  double phi_labeled = 0.0;   // mean SEAL loss on the labeled batch
  double psi = 0.0;           // mean pseudo-label cross-entropy
  double phi_pseudo = 0.0;    // mean SEAL loss on the pseudo batch
  double supervised_term = 0.0;  // ce (+ lambda * phi_labeled when applied)
  double total = 0.0;         // supervised_term + gamma*(psi + lambda*phi_pseudo)
  double retained_fraction = 0.0;
  double batch_accuracy = 0.0;
};

// One SGD-with-momentum step on L = mean CE + lambda * mean seal_loss, plus
// one hierarchy update on A2 when the spec is soft and lambda > 0.
LossBreakdown supervised_step(LinearModel& model, HierarchySpec& spec,
                              const std::vector<Vec>& features,
                              const std::vector<int>& labels,
                              const TrainConfig& config, int step,
                              SgdState& state);

// One step on L + gamma * [Psi + lambda * Phi] over a labeled and an
// unlabeled batch; augmentation and selection consume aug_rng in batch
// order (weak view first, then strong view, per sample).
LossBreakdown semisup_step(LinearModel& model, HierarchySpec& spec,
                           const std::vector<Vec>& labeled_features,
                           const std::vector<int>& labeled_labels,
                           const std::vector<Vec>& unlabeled_features,
                           const TrainConfig& config, int step, SgdState& state,
                           Rng& aug_rng);

// ---------------------------------------------------------------------------
// Evaluation and the training loop

struct EvalResult {
  double accuracy = 0.0;
  Vec per_class_accuracy;
  double mean_ce = 0.0;
  int count = 0;
};

// Deterministic metrics over a dataset. Rejects empty datasets and datasets
// with an empty class among [0, num_classes).
EvalResult evaluate(const LinearModel& model, const Dataset& data,
                    int num_classes);

struct StepMetrics {
  int step = 0;
  double lr = 0.0;
  double ce = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  double accuracy = 0.0;
  double retained_fraction = 0.0;
};

using MetricsSink = std::function<void(const StepMetrics&)>;

struct TrainResult {
  LinearModel model;
  HierarchySpec spec;
};

// Uniform-with-replacement batch indices; exported so replica loops can
// reproduce the exact sampling sequence.
std::vector<int> sample_indices(int pool_size, int count, Rng& rng);

// Full training loop: batches drawn per step from dataset.labeled (and
// dataset.unlabeled in semi-supervised mode), metrics emitted per step.
TrainResult run_training(const SplitDataset& dataset,
                         const HierarchySpec& init_spec,
                         const TrainConfig& config, TrainMode mode,
                         const MetricsSink& sink = nullptr);

}  // namespace seal

#include "seal/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace seal {

// ---------------------------------------------------------------------------
// Model

LinearModel LinearModel::make(int feature_dim, int num_classes, int hidden_dim,
                              Rng& rng) {
  LinearModel model;
  model.feature_dim = feature_dim;
  model.num_classes = num_classes;
  model.hidden_dim = hidden_dim;
  const int in_dim = hidden_dim > 0 ? hidden_dim : feature_dim;
  model.w_out = Matrix(num_classes, in_dim, 0.0);
  model.b_out.assign(num_classes, 0.0);
  if (hidden_dim > 0) {
    model.w_hidden = Matrix(hidden_dim, feature_dim);
    model.b_hidden.assign(hidden_dim, 0.0);
    const double bound = std::sqrt(6.0 / (feature_dim + hidden_dim));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (int i = 0; i < hidden_dim; ++i)
      for (int j = 0; j < feature_dim; ++j) model.w_hidden(i, j) = uniform(rng);
  }
  return model;
}

namespace {

struct ForwardTrace {
  Vec hidden;  // tanh activations (empty for linear models)
  Vec probs;
};

Vec softmax(const Vec& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vec p(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

ForwardTrace traced_forward(const LinearModel& model, const Vec& x) {
  ForwardTrace trace;
  if (model.hidden_dim > 0) {
    trace.hidden.resize(model.hidden_dim);
    for (int i = 0; i < model.hidden_dim; ++i) {
      double acc = model.b_hidden[i];
      for (int j = 0; j < model.feature_dim; ++j)
        acc += model.w_hidden(i, j) * x[j];
      trace.hidden[i] = std::tanh(acc);
    }
  }
  const Vec& input = model.hidden_dim > 0 ? trace.hidden : x;
  Vec logits(model.num_classes);
  for (int c = 0; c < model.num_classes; ++c) {
    double acc = model.b_out[c];
    for (size_t j = 0; j < input.size(); ++j) acc += model.w_out(c, j) * input[j];
    logits[c] = acc;
  }
  trace.probs = softmax(logits);
  return trace;
}

int argmax_lowest(const Vec& v) {
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

struct GradAccumulator {
  Matrix gw_out;
  Vec gb_out;
  Matrix gw_hidden;
  Vec gb_hidden;

  explicit GradAccumulator(const LinearModel& model)
      : gw_out(model.w_out.rows(), model.w_out.cols(), 0.0),
        gb_out(model.num_classes, 0.0),
        gw_hidden(model.w_hidden.rows(), model.w_hidden.cols(), 0.0),
        gb_hidden(model.b_hidden.size(), 0.0) {}

  // Backprop one sample's logit gradient (already weighted by its batch
  // coefficient) into the parameter accumulators.
  void add(const LinearModel& model, const Vec& x, const ForwardTrace& trace,
           const Vec& g_logits) {
    const Vec& input = model.hidden_dim > 0 ? trace.hidden : x;
    for (int c = 0; c < model.num_classes; ++c) {
      gb_out[c] += g_logits[c];
      for (size_t j = 0; j < input.size(); ++j)
        gw_out(c, j) += g_logits[c] * input[j];
    }
    if (model.hidden_dim > 0) {
      for (int i = 0; i < model.hidden_dim; ++i) {
        double gh = 0.0;
        for (int c = 0; c < model.num_classes; ++c)
          gh += model.w_out(c, i) * g_logits[c];
        gh *= 1.0 - trace.hidden[i] * trace.hidden[i];
        gb_hidden[i] += gh;
        for (int j = 0; j < model.feature_dim; ++j)
          gw_hidden(i, j) += gh * x[j];
      }
    }
  }
};

void sgd_update(LinearModel& model, SgdState& state,
                const GradAccumulator& grads, double lr, double momentum) {
  auto step_matrix = [&](Matrix& param, Matrix& velocity, const Matrix& grad) {
    for (int i = 0; i < param.rows(); ++i)
      for (int j = 0; j < param.cols(); ++j) {
        velocity(i, j) = momentum * velocity(i, j) + grad(i, j);
        param(i, j) -= lr * velocity(i, j);
      }
  };
  auto step_vec = [&](Vec& param, Vec& velocity, const Vec& grad) {
    for (size_t i = 0; i < param.size(); ++i) {
      velocity[i] = momentum * velocity[i] + grad[i];
      param[i] -= lr * velocity[i];
    }
  };
  step_matrix(model.w_out, state.vw_out, grads.gw_out);
  step_vec(model.b_out, state.vb_out, grads.gb_out);
  if (model.hidden_dim > 0) {
    step_matrix(model.w_hidden, state.vw_hidden, grads.gw_hidden);
    step_vec(model.b_hidden, state.vb_hidden, grads.gb_hidden);
  }
}

// d phi / d logits = J_softmax(p) * g_pred = p o g - p (p . g)
Vec seal_logit_gradient(const Vec& probs, const Vec& g_pred) {
  double dot = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) dot += probs[i] * g_pred[i];
  Vec g(probs.size());
  for (size_t i = 0; i < probs.size(); ++i)
    g[i] = probs[i] * (g_pred[i] - dot);
  return g;
}

Vec one_hot(int index, int size) {
  Vec v(size, 0.0);
  v[index] = 1.0;
  return v;
}

}  // namespace

Vec LinearModel::logits(const Vec& x) const {
  if (static_cast<int>(x.size()) != feature_dim)
    throw ValidationError("forward: feature dimension mismatch");
  Vec input;
  if (hidden_dim > 0) {
    input.resize(hidden_dim);
    for (int i = 0; i < hidden_dim; ++i) {
      double acc = b_hidden[i];
      for (int j = 0; j < feature_dim; ++j) acc += w_hidden(i, j) * x[j];
      input[i] = std::tanh(acc);
    }
  } else {
    input = x;
  }
  Vec z(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    double acc = b_out[c];
    for (size_t j = 0; j < input.size(); ++j) acc += w_out(c, j) * input[j];
    z[c] = acc;
  }
  return z;
}

Vec LinearModel::forward(const Vec& x) const { return softmax(logits(x)); }

nlohmann::json model_to_json(const LinearModel& model) {
  nlohmann::json j;
  j["feature_dim"] = model.feature_dim;
  j["num_classes"] = model.num_classes;
  j["hidden_dim"] = model.hidden_dim;
  j["w_out"] = model.w_out.to_rows();
  j["b_out"] = model.b_out;
  if (model.hidden_dim > 0) {
    j["w_hidden"] = model.w_hidden.to_rows();
    j["b_hidden"] = model.b_hidden;
  }
  return j;
}

LinearModel model_from_json(const nlohmann::json& j) {
  LinearModel model;
  model.feature_dim = j.at("feature_dim").get<int>();
  model.num_classes = j.at("num_classes").get<int>();
  model.hidden_dim = j.at("hidden_dim").get<int>();
  model.w_out = Matrix::from_rows(j.at("w_out").get<std::vector<Vec>>());
  model.b_out = j.at("b_out").get<Vec>();
  if (model.hidden_dim > 0) {
    model.w_hidden = Matrix::from_rows(j.at("w_hidden").get<std::vector<Vec>>());
    model.b_hidden = j.at("b_hidden").get<Vec>();
  }
  return model;
}

// ---------------------------------------------------------------------------
// Config

TrainMode train_mode_from_string(const std::string& name) {
  if (name == "supervised") return TrainMode::kSupervised;
  if (name == "semisup") return TrainMode::kSemiSupervised;
  throw ValidationError("unknown train mode: " + name);
}

std::string to_string(TrainMode mode) {
  return mode == TrainMode::kSupervised ? "supervised" : "semisup";
}

std::vector<std::string> TrainConfig::validate(TrainMode mode) const {
  std::vector<std::string> violations;
  if (lambda < 0.0) violations.push_back("lambda must be >= 0");
  if (gamma < 0.0) violations.push_back("gamma must be >= 0");
  if (tau < 0.0 || tau > 1.0) violations.push_back("tau must be in [0,1]");
  if (mu_ratio < 1) violations.push_back("mu_ratio must be >= 1");
  if (batch_size < 1) violations.push_back("batch_size must be >= 1");
  if (steps < 0) violations.push_back("steps must be >= 0");
  if (lr0 <= 0.0) violations.push_back("lr0 must be > 0");
  if (momentum < 0.0 || momentum >= 1.0)
    violations.push_back("momentum must be in [0,1)");
  if (a2_step_size < 0.0) violations.push_back("a2_step_size must be >= 0");
  if (sigma_weak < 0.0) violations.push_back("sigma_weak must be >= 0");
  if (sigma_strong < 0.0) violations.push_back("sigma_strong must be >= 0");
  if (dropout_strong < 0.0 || dropout_strong > 1.0)
    violations.push_back("dropout_strong must be in [0,1]");
  if (hidden_dim < 0) violations.push_back("hidden_dim must be >= 0");
  if (mode == TrainMode::kSemiSupervised && sigma_strong <= sigma_weak)
    violations.push_back(
        "sigma_strong must exceed sigma_weak for semi-supervised runs");
  return violations;
}

nlohmann::json config_to_json(const TrainConfig& config) {
  return {{"lambda", config.lambda},
          {"gamma", config.gamma},
          {"tau", config.tau},
          {"mu_ratio", config.mu_ratio},
          {"batch_size", config.batch_size},
          {"steps", config.steps},
          {"lr0", config.lr0},
          {"momentum", config.momentum},
          {"lr_schedule",
           config.lr_schedule == LrSchedule::kCosine ? "cosine" : "constant"},
          {"a2_step_size", config.a2_step_size},
          {"seed", config.seed},
          {"hierarchy_update", to_string(config.hierarchy_update)},
          {"sigma_weak", config.sigma_weak},
          {"sigma_strong", config.sigma_strong},
          {"dropout_strong", config.dropout_strong},
          {"hidden_dim", config.hidden_dim},
          {"seal_on_labeled", config.seal_on_labeled}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig config;
  config.lambda = j.value("lambda", config.lambda);
  config.gamma = j.value("gamma", config.gamma);
  config.tau = j.value("tau", config.tau);
  config.mu_ratio = j.value("mu_ratio", config.mu_ratio);
  config.batch_size = j.value("batch_size", config.batch_size);
  config.steps = j.value("steps", config.steps);
  config.lr0 = j.value("lr0", config.lr0);
  config.momentum = j.value("momentum", config.momentum);
  const std::string schedule = j.value("lr_schedule", std::string("cosine"));
  if (schedule == "cosine") {
    config.lr_schedule = LrSchedule::kCosine;
  } else if (schedule == "constant") {
    config.lr_schedule = LrSchedule::kConstant;
  } else {
    throw ValidationError("unknown lr_schedule: " + schedule);
  }
  config.a2_step_size = j.value("a2_step_size", config.a2_step_size);
  config.seed = j.value("seed", config.seed);
  config.hierarchy_update = hierarchy_update_from_string(
      j.value("hierarchy_update", std::string("pgd")));
  config.sigma_weak = j.value("sigma_weak", config.sigma_weak);
  config.sigma_strong = j.value("sigma_strong", config.sigma_strong);
  config.dropout_strong = j.value("dropout_strong", config.dropout_strong);
  config.hidden_dim = j.value("hidden_dim", config.hidden_dim);
  config.seal_on_labeled = j.value("seal_on_labeled", config.seal_on_labeled);
  return config;
}

double scheduled_lr(const TrainConfig& config, int step) {
  if (config.lr_schedule == LrSchedule::kConstant || config.steps <= 0)
    return config.lr0;
  const double progress = static_cast<double>(step) / config.steps;
  return config.lr0 *
         std::cos(7.0 * std::numbers::pi / 16.0 * progress);
}

// ---------------------------------------------------------------------------
// Losses

double cross_entropy(const Vec& prediction, int target) {
  if (target < 0 || target >= static_cast<int>(prediction.size()))
    throw ValidationError("cross_entropy: target index out of range");
  return -std::log(std::max(prediction[target], 1e-300));
}

double label_smoothing_ce(const Vec& prediction, int target, double alpha) {
  if (alpha < 0.0 || alpha >= 1.0)
    throw ValidationError("label_smoothing_ce: alpha must be in [0,1)");
  if (target < 0 || target >= static_cast<int>(prediction.size()))
    throw ValidationError("label_smoothing_ce: target index out of range");
  const int k = static_cast<int>(prediction.size());
  double loss = 0.0;
  for (int i = 0; i < k; ++i) {
    const double weight = alpha / k + (i == target ? 1.0 - alpha : 0.0);
    loss -= weight * std::log(std::max(prediction[i], 1e-300));
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Augmentation and pseudo-labeling

Vec augment(const Vec& x, AugmentKind kind, const TrainConfig& config,
            Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma =
      kind == AugmentKind::kWeak ? config.sigma_weak : config.sigma_strong;
  Vec out(x.size());
  for (size_t d = 0; d < x.size(); ++d) out[d] = x[d] + sigma * gauss(rng);
  if (kind == AugmentKind::kStrong) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (size_t d = 0; d < x.size(); ++d)
      if (uniform(rng) < config.dropout_strong) out[d] = 0.0;
  }
  return out;
}

PseudoBatch pseudo_label(const LinearModel& model,
                         const std::vector<Vec>& weak_views, double tau) {
  if (tau < 0.0 || tau > 1.0)
    throw ValidationError("pseudo_label: tau must be in [0,1]");
  PseudoBatch batch;
  batch.retained.resize(weak_views.size(), 0);
  batch.labels.resize(weak_views.size(), -1);
  for (size_t i = 0; i < weak_views.size(); ++i) {
    const Vec probs = model.forward(weak_views[i]);
    const int label = argmax_lowest(probs);
    if (probs[label] >= tau) {
      batch.retained[i] = 1;
      batch.labels[i] = label;
      ++batch.retained_count;
    }
  }
  batch.retained_fraction =
      weak_views.empty()
          ? 0.0
          : static_cast<double>(batch.retained_count) / weak_views.size();
  return batch;
}

// ---------------------------------------------------------------------------
// Steps

SgdState SgdState::zeros_like(const LinearModel& model) {
  SgdState state;
  state.vw_out = Matrix(model.w_out.rows(), model.w_out.cols(), 0.0);
  state.vb_out.assign(model.num_classes, 0.0);
  state.vw_hidden = Matrix(model.w_hidden.rows(), model.w_hidden.cols(), 0.0);
  state.vb_hidden.assign(model.b_hidden.size(), 0.0);
  return state;
}

LossBreakdown supervised_step(LinearModel& model, HierarchySpec& spec,
                              const std::vector<Vec>& features,
                              const std::vector<int>& labels,
                              const TrainConfig& config, int step,
                              SgdState& state) {
  if (features.empty())
    throw ValidationError("supervised_step: empty labeled batch");
  const int batch = static_cast<int>(features.size());
  const double inv_batch = 1.0 / batch;
  const bool use_seal = config.lambda != 0.0;
  const bool learn_a2 = use_seal && !spec.is_hard() && config.a2_step_size > 0;

  GradAccumulator grads(model);
  Matrix a2_grad(spec.num_latent, spec.num_observed, 0.0);
  LossBreakdown out;

  // The objective caches absorption for the current A2; rebuilt every step.
  std::optional<SealObjective> objective;
  if (use_seal) objective.emplace(spec);

  int correct = 0;
  for (int i = 0; i < batch; ++i) {
    const ForwardTrace trace = traced_forward(model, features[i]);
    const int y = labels[i];
    out.ce += cross_entropy(trace.probs, y);
    if (argmax_lowest(trace.probs) == y) ++correct;

    Vec g_logits(model.num_classes);
    for (int c = 0; c < model.num_classes; ++c)
      g_logits[c] = (trace.probs[c] - (c == y ? 1.0 : 0.0)) * inv_batch;

    if (use_seal) {
      const Vec target = one_hot(y, model.num_classes);
      out.phi_labeled += objective->loss(trace.probs, target);
      const SealGradients seal = objective->grad(trace.probs, target);
      const Vec g_seal = seal_logit_gradient(trace.probs, seal.grad_wrt_prediction);
      for (int c = 0; c < model.num_classes; ++c)
        g_logits[c] += config.lambda * inv_batch * g_seal[c];
      if (learn_a2)
        for (int s = 0; s < spec.num_latent; ++s)
          for (int r = 0; r < spec.num_observed; ++r)
            a2_grad(s, r) += inv_batch * seal.grad_wrt_a2(s, r);
    }
    grads.add(model, features[i], trace, g_logits);
  }

  out.ce *= inv_batch;
  out.phi_labeled *= inv_batch;
  out.batch_accuracy = static_cast<double>(correct) / batch;
  out.supervised_term = out.ce + (use_seal ? config.lambda * out.phi_labeled : 0.0);
  out.total = out.supervised_term;

  sgd_update(model, state, grads, scheduled_lr(config, step), config.momentum);
  if (learn_a2)
    spec = update_hierarchy(spec, a2_grad, config.a2_step_size,
                            config.hierarchy_update);
  return out;
}

LossBreakdown semisup_step(LinearModel& model, HierarchySpec& spec,
                           const std::vector<Vec>& labeled_features,
                           const std::vector<int>& labeled_labels,
                           const std::vector<Vec>& unlabeled_features,
                           const TrainConfig& config, int step, SgdState& state,
                           Rng& aug_rng) {
  if (labeled_features.empty())
    throw ValidationError("semisup_step: empty labeled batch");
  const int labeled = static_cast<int>(labeled_features.size());
  const double inv_labeled = 1.0 / labeled;
  const bool use_seal = config.lambda != 0.0;
  const bool seal_labeled = use_seal && config.seal_on_labeled;
  const bool learn_a2 = use_seal && !spec.is_hard() && config.a2_step_size > 0;

  GradAccumulator grads(model);
  Matrix a2_grad(spec.num_latent, spec.num_observed, 0.0);
  LossBreakdown out;
  std::optional<SealObjective> objective;
  if (use_seal) objective.emplace(spec);

  // Labeled part: the supervised objective.
  int correct = 0;
  for (int i = 0; i < labeled; ++i) {
    const ForwardTrace trace = traced_forward(model, labeled_features[i]);
    const int y = labeled_labels[i];
    out.ce += cross_entropy(trace.probs, y);
    if (argmax_lowest(trace.probs) == y) ++correct;

    Vec g_logits(model.num_classes);
    for (int c = 0; c < model.num_classes; ++c)
      g_logits[c] = (trace.probs[c] - (c == y ? 1.0 : 0.0)) * inv_labeled;

    if (seal_labeled) {
      const Vec target = one_hot(y, model.num_classes);
      out.phi_labeled += objective->loss(trace.probs, target);
      const SealGradients seal = objective->grad(trace.probs, target);
      const Vec g_seal = seal_logit_gradient(trace.probs, seal.grad_wrt_prediction);
      for (int c = 0; c < model.num_classes; ++c)
        g_logits[c] += config.lambda * inv_labeled * g_seal[c];
      if (learn_a2)
        for (int s = 0; s < spec.num_latent; ++s)
          for (int r = 0; r < spec.num_observed; ++r)
            a2_grad(s, r) += inv_labeled * seal.grad_wrt_a2(s, r);
    }
    grads.add(model, labeled_features[i], trace, g_logits);
  }
  out.ce *= inv_labeled;
  out.phi_labeled *= inv_labeled;
  out.batch_accuracy = static_cast<double>(correct) / labeled;

  // Unlabeled part: pseudo-labels from weak views, losses on strong views.
  // Per sample the rng is consumed weak-first so runs replay exactly.
  std::vector<Vec> weak_views, strong_views;
  weak_views.reserve(unlabeled_features.size());
  strong_views.reserve(unlabeled_features.size());
  for (const Vec& x : unlabeled_features) {
    weak_views.push_back(augment(x, AugmentKind::kWeak, config, aug_rng));
    strong_views.push_back(augment(x, AugmentKind::kStrong, config, aug_rng));
  }
  const PseudoBatch selection = pseudo_label(model, weak_views, config.tau);
  out.retained_fraction = selection.retained_fraction;

  if (selection.retained_count > 0 && config.gamma != 0.0) {
    const double inv_retained = 1.0 / selection.retained_count;
    for (size_t i = 0; i < strong_views.size(); ++i) {
      if (!selection.retained[i]) continue;
      const int y = selection.labels[i];
      const ForwardTrace trace = traced_forward(model, strong_views[i]);
      out.psi += cross_entropy(trace.probs, y);

      Vec g_logits(model.num_classes);
      for (int c = 0; c < model.num_classes; ++c)
        g_logits[c] = config.gamma * inv_retained *
                      (trace.probs[c] - (c == y ? 1.0 : 0.0));

      if (use_seal) {
        const Vec target = one_hot(y, model.num_classes);
        out.phi_pseudo += objective->loss(trace.probs, target);
        const SealGradients seal = objective->grad(trace.probs, target);
        const Vec g_seal =
            seal_logit_gradient(trace.probs, seal.grad_wrt_prediction);
        for (int c = 0; c < model.num_classes; ++c)
          g_logits[c] += config.gamma * config.lambda * inv_retained * g_seal[c];
        if (learn_a2)
          for (int s = 0; s < spec.num_latent; ++s)
            for (int r = 0; r < spec.num_observed; ++r)
              a2_grad(s, r) +=
                  config.gamma * inv_retained * seal.grad_wrt_a2(s, r);
      }
      grads.add(model, strong_views[i], trace, g_logits);
    }
    out.psi *= inv_retained;
    out.phi_pseudo *= inv_retained;
  }

  out.supervised_term =
      out.ce + (seal_labeled ? config.lambda * out.phi_labeled : 0.0);
  out.total = out.supervised_term +
              config.gamma * (out.psi + config.lambda * out.phi_pseudo);

  sgd_update(model, state, grads, scheduled_lr(config, step), config.momentum);
  if (learn_a2)
    spec = update_hierarchy(spec, a2_grad, config.a2_step_size,
                            config.hierarchy_update);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation and loop

EvalResult evaluate(const LinearModel& model, const Dataset& data,
                    int num_classes) {
  if (data.empty()) throw ValidationError("evaluate: empty dataset");
  std::vector<int> per_class_total(num_classes, 0);
  std::vector<int> per_class_correct(num_classes, 0);
  EvalResult result;
  result.count = data.size();
  for (int i = 0; i < data.size(); ++i) {
    const int y = data.labels[i];
    if (y < 0 || y >= num_classes)
      throw ValidationError("evaluate: label out of range");
    const Vec probs = model.forward(data.features[i]);
    result.mean_ce += cross_entropy(probs, y);
    ++per_class_total[y];
    if (argmax_lowest(probs) == y) {
      ++per_class_correct[y];
      result.accuracy += 1.0;
    }
  }
  for (int c = 0; c < num_classes; ++c)
    if (per_class_total[c] == 0)
      throw ValidationError("evaluate: class " + std::to_string(c) +
                            " has no samples");
  result.accuracy /= data.size();
  result.mean_ce /= data.size();
  result.per_class_accuracy.resize(num_classes);
  for (int c = 0; c < num_classes; ++c)
    result.per_class_accuracy[c] =
        static_cast<double>(per_class_correct[c]) / per_class_total[c];
  return result;
}

std::vector<int> sample_indices(int pool_size, int count, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, pool_size - 1);
  std::vector<int> indices(count);
  for (int& index : indices) index = pick(rng);
  return indices;
}

TrainResult run_training(const SplitDataset& dataset,
                         const HierarchySpec& init_spec,
                         const TrainConfig& config, TrainMode mode,
                         const MetricsSink& sink) {
  const std::vector<std::string> violations = config.validate(mode);
  if (!violations.empty()) {
    std::vector<ValidationIssue> issues;
    for (const std::string& v : violations) issues.push_back({"config", -1, -1, v});
    throw ValidationError("invalid train config", issues);
  }
  require_valid(init_spec);
  if (dataset.labeled.empty())
    throw ValidationError("run_training: no labeled data");
  if (mode == TrainMode::kSemiSupervised && dataset.unlabeled.empty())
    throw ValidationError("run_training: semi-supervised mode needs unlabeled data");
  const int feature_dim = static_cast<int>(dataset.labeled.features[0].size());
  if (init_spec.num_observed != dataset.num_classes())
    throw ValidationError("run_training: hierarchy has " +
                          std::to_string(init_spec.num_observed) +
                          " leaves but dataset has " +
                          std::to_string(dataset.num_classes()) + " classes");

  Rng model_rng(mix_seed(config.seed, 1));
  Rng batch_rng(mix_seed(config.seed, 2));
  Rng aug_rng(mix_seed(config.seed, 3));

  TrainResult result;
  result.model = LinearModel::make(feature_dim, dataset.num_classes(),
                                   config.hidden_dim, model_rng);
  result.spec = init_spec;
  SgdState state = SgdState::zeros_like(result.model);

  std::vector<Vec> labeled_features(config.batch_size);
  std::vector<int> labeled_labels(config.batch_size);
  std::vector<Vec> unlabeled_features;

  for (int step = 0; step < config.steps; ++step) {
    const std::vector<int> labeled_idx =
        sample_indices(dataset.labeled.size(), config.batch_size, batch_rng);
    for (int i = 0; i < config.batch_size; ++i) {
      labeled_features[i] = dataset.labeled.features[labeled_idx[i]];
      labeled_labels[i] = dataset.labeled.labels[labeled_idx[i]];
    }

    LossBreakdown breakdown;
    if (mode == TrainMode::kSupervised) {
      breakdown = supervised_step(result.model, result.spec, labeled_features,
                                  labeled_labels, config, step, state);
    } else {
      const std::vector<int> unlabeled_idx = sample_indices(
          dataset.unlabeled.size(), config.batch_size * config.mu_ratio,
          batch_rng);
      unlabeled_features.resize(unlabeled_idx.size());
      for (size_t i = 0; i < unlabeled_idx.size(); ++i)
        unlabeled_features[i] = dataset.unlabeled.features[unlabeled_idx[i]];
      breakdown =
          semisup_step(result.model, result.spec, labeled_features,
                       labeled_labels, unlabeled_features, config, step,
                       state, aug_rng);
    }

    if (sink) {
      StepMetrics metrics;
      metrics.step = step;
      metrics.lr = scheduled_lr(config, step);
      metrics.ce = breakdown.ce;
      metrics.psi = breakdown.psi;
      metrics.phi = mode == TrainMode::kSupervised ? breakdown.phi_labeled
                                                   : breakdown.phi_pseudo;
      metrics.accuracy = breakdown.batch_accuracy;
      metrics.retained_fraction = breakdown.retained_fraction;
      sink(metrics);
    }
  }
  return result;
}

}  // namespace seal

#include "seal/objective.hpp"

#include <algorithm>
#include <cmath>

namespace seal {

namespace {

// Subgradient convention: sign(0) = 0, with a dead band around the kink.
// The root coordinate of any lifted on-simplex difference is exactly zero
// in exact arithmetic but lands at +-1e-17 in floating point; without the
// dead band it would inject a spurious +-w_0 into every gradient entry.
constexpr double kKinkTol = 1e-12;

double sign_or_zero(double x) {
  if (x > kKinkTol) return 1.0;
  if (x < -kKinkTol) return -1.0;
  return 0.0;
}

}  // namespace

TotalVector total_extension(const HierarchySpec& spec, const Vec& p) {
  require_valid(spec);
  if (static_cast<int>(p.size()) != spec.num_observed)
    throw ValidationError("total_extension: vector length mismatch");
  const Matrix alpha = absorption(spec);
  TotalVector q;
  q.num_latent = spec.num_latent;
  q.values.resize(spec.total_nodes());
  const Vec lifted = alpha.multiply(p);
  for (int s = 0; s < spec.num_latent; ++s) q.values[s] = lifted[s];
  for (int r = 0; r < spec.num_observed; ++r)
    q.values[spec.num_latent + r] = p[r];
  return q;
}

SealObjective::SealObjective(const HierarchySpec& spec)
    : num_latent_(spec.num_latent), hard_(spec.is_hard()),
      weights_(spec.weights) {
  require_valid(spec);
  const int m = spec.num_latent;
  const int k = spec.num_observed;
  const Matrix alpha = absorption(spec);
  extension_ = Matrix(m + k, k);
  for (int s = 0; s < m; ++s)
    for (int r = 0; r < k; ++r) extension_(s, r) = alpha(s, r);
  for (int r = 0; r < k; ++r) extension_(m + r, r) = 1.0;
  walk_ = latent_walk(spec);
}

double SealObjective::loss(const Vec& prediction, const Vec& target) const {
  // Extend both vectors separately, then compare. The relaxed
  // tree-Wasserstein path lifts the difference instead; the two must agree.
  const Vec q_pred = extension_.multiply(prediction);
  const Vec q_target = extension_.multiply(target);
  double total = 0.0;
  for (int v = 0; v < extension_.rows(); ++v)
    total += weights_[v] * std::abs(q_pred[v] - q_target[v]);
  return total;
}

SealGradients SealObjective::grad(const Vec& prediction,
                                  const Vec& target) const {
  const int k = extension_.cols();
  const int m = num_latent_;

  Vec diff(k);
  for (int r = 0; r < k; ++r) diff[r] = prediction[r] - target[r];
  const Vec lifted = extension_.multiply(diff);

  Vec weighted_sign(extension_.rows());
  for (int v = 0; v < extension_.rows(); ++v)
    weighted_sign[v] = weights_[v] * sign_or_zero(lifted[v]);

  SealGradients g;
  g.grad_wrt_prediction = extension_.multiply_transposed(weighted_sign);
  g.grad_wrt_a2 = Matrix(m, k, 0.0);
  if (!hard_) {
    // d loss / d A2[i][j] = sum_s w_s sign_s [(I-A1)^{-1}]_{s,i} diff_j
    Vec coeff(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int s = 0; s < m; ++s) acc += weighted_sign[s] * walk_(s, i);
      coeff[i] = acc;
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) g.grad_wrt_a2(i, j) = coeff[i] * diff[j];
  }
  return g;
}

double seal_loss(const HierarchySpec& spec, const Vec& prediction,
                 const Vec& target) {
  if (static_cast<int>(prediction.size()) != spec.num_observed ||
      static_cast<int>(target.size()) != spec.num_observed)
    throw ValidationError("seal_loss: vector length mismatch");
  return SealObjective(spec).loss(prediction, target);
}

SealGradients seal_grad(const HierarchySpec& spec, const Vec& prediction,
                        const Vec& target) {
  if (static_cast<int>(prediction.size()) != spec.num_observed ||
      static_cast<int>(target.size()) != spec.num_observed)
    throw ValidationError("seal_grad: vector length mismatch");
  return SealObjective(spec).grad(prediction, target);
}

Vec project_simplex(const Vec& y) {
  // Sort-based projection: find the largest support size rho with
  // y_(rho) > (sum of top rho entries - 1) / rho, then shift and clip.
  const int n = static_cast<int>(y.size());
  Vec sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0, tau = 0.0;
  for (int i = 0; i < n; ++i) {
    running += sorted[i];
    const double candidate = (running - 1.0) / (i + 1);
    if (sorted[i] - candidate > 0.0) tau = candidate;
  }
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = std::max(y[i] - tau, 0.0);
  return x;
}

Matrix project_simplex_columns(const Matrix& a2) {
  Matrix out = a2;
  Vec column(a2.rows());
  for (int j = 0; j < a2.cols(); ++j) {
    for (int i = 0; i < a2.rows(); ++i) column[i] = a2(i, j);
    const Vec projected = project_simplex(column);
    for (int i = 0; i < a2.rows(); ++i) out(i, j) = projected[i];
  }
  return out;
}

HierarchyUpdate hierarchy_update_from_string(const std::string& name) {
  if (name == "pgd") return HierarchyUpdate::kPgd;
  if (name == "softmax") return HierarchyUpdate::kSoftmax;
  throw ValidationError("unknown hierarchy update method: " + name);
}

std::string to_string(HierarchyUpdate method) {
  return method == HierarchyUpdate::kPgd ? "pgd" : "softmax";
}

HierarchySpec update_hierarchy(const HierarchySpec& spec,
                               const Matrix& grad_wrt_a2, double step_size,
                               HierarchyUpdate method) {
  if (spec.is_hard())
    throw ValidationError("update_hierarchy requires a soft spec",
                          {{"mode", -1, -1, "spec is hard"}});
  if (!grad_wrt_a2.same_shape(spec.a2))
    throw ValidationError("update_hierarchy: gradient shape mismatch");

  HierarchySpec out = spec;
  const int m = spec.num_latent;
  const int k = spec.num_observed;

  if (method == HierarchyUpdate::kPgd) {
    Matrix stepped = spec.a2;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j)
        stepped(i, j) -= step_size * grad_wrt_a2(i, j);
    out.a2 = project_simplex_columns(stepped);
    return out;
  }

  // Softmax path: recover logits from the current column, push the gradient
  // through the softmax Jacobian, step, and map back.
  for (int j = 0; j < k; ++j) {
    Vec column(m), logits(m), grad_logits(m);
    for (int i = 0; i < m; ++i) {
      column[i] = spec.a2(i, j);
      logits[i] = std::log(std::max(column[i], 1e-12));
    }
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += column[i] * grad_wrt_a2(i, j);
    for (int i = 0; i < m; ++i)
      grad_logits[i] = column[i] * (grad_wrt_a2(i, j) - dot);
    for (int i = 0; i < m; ++i) logits[i] -= step_size * grad_logits[i];

    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      column[i] = std::exp(logits[i] - peak);
      total += column[i];
    }
    for (int i = 0; i < m; ++i) out.a2(i, j) = column[i] / total;
  }
  return out;
}

}  // namespace seal

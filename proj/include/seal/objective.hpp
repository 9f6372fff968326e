#pragma once

#include <string>

#include "seal/hierarchy.hpp"
#include "seal/matrix.hpp"

namespace seal {

// A length-K probability vector lifted to all N nodes: the observed block is
// the vector itself, the latent block is alpha * vector. Not a probability
// (latent entries aggregate leaf mass), but every entry is in [0,1] when the
// spec is valid.
struct TotalVector {
  Vec values;          // length N, latent block first
  int num_latent = 0;  // partition marker

  double latent(int s) const { return values[s]; }
  double observed(int r) const { return values[num_latent + r]; }
};

TotalVector total_extension(const HierarchySpec& spec, const Vec& p);

struct SealGradients {
  Vec grad_wrt_prediction;  // length K
  Matrix grad_wrt_a2;       // M x K; zero when the spec is hard (frozen)
};

// Weighted-l1 objective between total extensions, with analytic subgradients
// for both the model prediction and the soft assignment A2. Caches the
// stacked extension matrix and the latent walk matrix; rebuild after every
// A2 update.
class SealObjective {
 public:
  explicit SealObjective(const HierarchySpec& spec);

  // sum_s w_s | q(prediction)_s - q(target)_s |; agrees with the relaxed
  // tree-Wasserstein distance between the two vectors.
  double loss(const Vec& prediction, const Vec& target) const;

  // grad_wrt_prediction = E^T (w o sign(E (prediction - target)))
  // grad_wrt_a2[i][j]   = sum_{latent s} w_s sign_s walk[s][i] d_j
  // with the subgradient convention sign(0) = 0, so prediction == target is
  // a fixed point.
  SealGradients grad(const Vec& prediction, const Vec& target) const;

  const Matrix& extension() const { return extension_; }

 private:
  int num_latent_ = 0;
  bool hard_ = false;
  Matrix extension_;  // N x K stacked [alpha; I]
  Matrix walk_;       // M x M, (I - A1)^{-1}
  Vec weights_;
};

double seal_loss(const HierarchySpec& spec, const Vec& prediction,
                 const Vec& target);
SealGradients seal_grad(const HierarchySpec& spec, const Vec& prediction,
                        const Vec& target);

// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
Vec project_simplex(const Vec& y);
Matrix project_simplex_columns(const Matrix& a2);

enum class HierarchyUpdate { kPgd, kSoftmax };

HierarchyUpdate hierarchy_update_from_string(const std::string& name);
std::string to_string(HierarchyUpdate method);

// One descent step on A2. kPgd projects each column back onto the simplex
// after the step. kSoftmax re-parameterizes each column as softmax of
// logits (recovered as log of the current column, floored at 1e-12) and
// steps in logit space; kept as the experimental alternative. Soft specs
// only; the result always satisfies the relaxed tree conditions.
HierarchySpec update_hierarchy(const HierarchySpec& spec,
                               const Matrix& grad_wrt_a2, double step_size,
                               HierarchyUpdate method);

}  // namespace seal

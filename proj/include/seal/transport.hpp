#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "seal/hierarchy.hpp"
#include "seal/matrix.hpp"

namespace seal {

// ---------------------------------------------------------------------------
// Tree-Wasserstein (closed form, hard trees)

// W(mu, nu) = sum_v w_v |mu(Gamma(v)) - nu(Gamma(v))| over all nodes, with
// subtree masses computed by graph traversal. Hard mode only; zero iff
// mu == nu when all leaf weights are positive.
double tree_wasserstein(const HierarchySpec& spec, const Vec& mu,
                        const Vec& nu);

// ---------------------------------------------------------------------------
// Relaxed tree-Wasserstein (soft or hard trees)

// Caches the stacked (N x K) extension matrix [alpha; I] of a spec so that
// repeated distance queries (kNN, Gram matrices) cost O(N*K) each.
class RtwEvaluator {
 public:
  explicit RtwEvaluator(const HierarchySpec& spec);

  // sum_v w_v | sum_x alpha_vx (mu(x) - nu(x)) |. Inputs must be length-K;
  // probability validation is the caller's job.
  double distance(const Vec& mu, const Vec& nu) const;

  const Matrix& extension() const { return extension_; }
  const Vec& node_weights() const { return weights_; }
  int num_observed() const { return extension_.cols(); }

 private:
  Matrix extension_;  // N x K: absorption rows stacked over the identity
  Vec weights_;
};

// One-shot convenience wrapper; validates the spec and both vectors.
// Degenerates to tree_wasserstein exactly on hard specs.
double relaxed_tree_wasserstein(const HierarchySpec& spec, const Vec& mu,
                                const Vec& nu);

// ---------------------------------------------------------------------------
// Exact LP oracle (validation only; capped at 64 support points)

struct TransportPlan {
  Matrix plan;  // n x m nonnegative, row sums mu, column sums nu
  double cost = 0.0;
};

// Exact optimal transport via the transportation simplex (northwest-corner
// start, MODI pricing, Bland fallback against cycling). Throws
// ValidationError for infeasible marginals (sums differing by > 1e-9),
// nonfinite or negative costs, or sizes above the cap.
TransportPlan lp_wasserstein_oracle(const Matrix& cost, const Vec& mu,
                                    const Vec& nu);

// ---------------------------------------------------------------------------
// Negative-definiteness probe (Theorem: RTW is a negative definite kernel)

struct NegdefReport {
  double max_violation = 0.0;  // max over trials of sum_ij c_i c_j RTW(x_i,x_j)
  double gram_scale = 0.0;     // max entry of the RTW Gram matrix
  int trials = 0;
  bool pass = false;           // max_violation <= 1e-10 * gram_scale
};

NegdefReport negdef_check(const HierarchySpec& spec,
                          const std::vector<Vec>& samples, int trials,
                          uint64_t seed);

// ---------------------------------------------------------------------------
// kNN in RTW space

// Majority label among the k nearest training vectors. Distance ties keep
// training-set order; vote ties resolve to the smallest label.
int rtw_knn(const HierarchySpec& spec,
            const std::vector<std::pair<Vec, int>>& train, const Vec& query,
            int k);
int rtw_knn(const RtwEvaluator& evaluator,
            const std::vector<std::pair<Vec, int>>& train, const Vec& query,
            int k);

}  // namespace seal

#pragma once

#include <string>
#include <vector>

#include "seal/errors.hpp"
#include "seal/matrix.hpp"
#include "seal/rng.hpp"

namespace seal {

// Label hierarchy over K observed labels (tree leaves) and M latent nodes.
//
// Node ordering is positional: latent nodes occupy indices 0..M-1 with the
// root at index 0, observed labels occupy indices M..N-1 (N = M + K). The
// block adjacency of the full graph is
//
//     A = [ A1  A2 ]      A1: M x M latent-to-latent, always {0,1}
//         [  0   0 ]      A2: M x K latent-to-observed, {0,1} or [0,1]
//
// A valid hierarchy satisfies: A strictly upper triangular, and every
// non-root column of A sums to 1 (the root column sums to 0). When A2
// columns sit strictly inside the probability simplex the spec is "soft".
struct HierarchySpec {
  int num_observed = 0;  // K
  int num_latent = 0;    // M
  Matrix a1;             // M x M
  Matrix a2;             // M x K
  Vec weights;           // length N; w[v] is the incoming-edge weight of v
  std::vector<std::string> observed_names;  // size K or empty
  std::vector<std::string> latent_names;    // size M or empty

  int total_nodes() const { return num_latent + num_observed; }

  // Hard means every A2 entry is exactly 0 or 1 (one-hot leaf assignment).
  bool is_hard() const;

  std::string observed_name(int leaf) const;
  std::string latent_name(int node) const;
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  bool ok = false;
  std::vector<ValidationIssue> issues;

  std::string to_string() const;
};

// Checks the two tree conditions on the assembled block matrix:
//   1. strict upper triangularity (reduces to A1 strictly upper triangular),
//   2. column sums (0,1,...,1) within 1e-8,
// plus entry-range and weight-sign checks. Soft specs get the relaxed [0,1]
// entry condition on A2. Dimension mismatches are reported as structural
// issues (code "structure"), distinct from condition violations.
ValidationReport validate_adjacency(const HierarchySpec& spec);

// Throws ValidationError carrying the report when validation fails.
void require_valid(const HierarchySpec& spec);

// Probability vector over the K observed labels: nonnegative, sums to 1
// within 1e-8. `name` labels the offending argument in error messages.
ValidationReport validate_prob_vector(const Vec& p);
void require_prob_vector(const Vec& p, const std::string& name);

// ---------------------------------------------------------------------------
// Core operations

// Absorption probabilities alpha = (I - A1)^{-1} A2, solved by
// back-substitution on the strictly upper triangular A1 (no dense inverse).
// Row 0 (root) is all ones for every valid spec. In hard mode alpha[s][r]
// is the indicator that leaf r lies in the subtree of latent node s.
Matrix absorption(const HierarchySpec& spec);

// (I - A1)^{-1} on the latent block, by the same back-substitution. Entry
// [s][t] is the walk weight from latent s to latent t; needed by the
// objective gradients.
Matrix latent_walk(const HierarchySpec& spec);

// Pairwise shortest-path distances on the hard tree. d(u,v) sums the
// incoming-edge weights w of every node on the path (the root carries none).
// Hard mode only.
Matrix tree_metric(const HierarchySpec& spec);

// Mass of mu inside the subtree rooted at `node`. Observed nodes return
// their own entry; the root returns the total mass. Hard mode only.
double subtree_mass(const HierarchySpec& spec, const Vec& mu, int node);

// One-hot A2 by per-column argmax; ties go to the lowest latent index.
// Idempotent; the result validates in hard mode.
HierarchySpec harden(const HierarchySpec& spec);

// Parent index per node (-1 for the root). Hard mode only.
std::vector<int> parent_of(const HierarchySpec& spec);

// ---------------------------------------------------------------------------
// Random hierarchy generation
//
// The latent prior is a random rooted tree: node i > 0 picks a parent among
// lower-indexed latents (depth-capped when max_depth > 0), which keeps A1
// strictly upper triangular by construction. Leaf columns are one-hot for
// hard specs and interior simplex points for soft ones.
struct RandomTreeOptions {
  int num_observed = 2;
  int num_latent = 1;
  bool soft = false;
  bool unit_weights = true;   // false: weights ~ U[min_weight, max_weight]
  double min_weight = 0.1;
  double max_weight = 2.0;
  int max_depth = 0;          // 0 = unconstrained; otherwise max leaf depth
  double root_mass_scale = 1.0;  // < 1 damps soft-column mass on the root row
};

HierarchySpec random_hierarchy(const RandomTreeOptions& opts, Rng& rng);

}  // namespace seal

#pragma once

// Small canonical hierarchies shared across the test suites.

#include "seal/hierarchy.hpp"

namespace fixtures {

using seal::HierarchySpec;
using seal::Matrix;
using seal::Vec;

inline Vec one_hot(int size, int index) {
  Vec v(size, 0.0);
  v[index] = 1.0;
  return v;
}

// Root with k observed children.
inline HierarchySpec star_tree(int k = 3) {
  HierarchySpec spec;
  spec.num_latent = 1;
  spec.num_observed = k;
  spec.a1 = Matrix(1, 1, 0.0);
  spec.a2 = Matrix(1, k, 1.0);
  spec.weights.assign(1 + k, 1.0);
  return spec;
}

// root -> v1 -> single leaf.
inline HierarchySpec chain_spec() {
  HierarchySpec spec;
  spec.num_latent = 2;
  spec.num_observed = 1;
  spec.a1 = Matrix(2, 2, 0.0);
  spec.a1(0, 1) = 1.0;
  spec.a2 = Matrix(2, 1, 0.0);
  spec.a2(1, 0) = 1.0;
  spec.weights.assign(3, 1.0);
  return spec;
}

// root with children v1, v2; leaves l1,l2 under v1 and l3,l4 under v2.
inline HierarchySpec balanced_binary() {
  HierarchySpec spec;
  spec.num_latent = 3;
  spec.num_observed = 4;
  spec.a1 = Matrix(3, 3, 0.0);
  spec.a1(0, 1) = 1.0;
  spec.a1(0, 2) = 1.0;
  spec.a2 = Matrix(3, 4, 0.0);
  spec.a2(1, 0) = 1.0;
  spec.a2(1, 1) = 1.0;
  spec.a2(2, 2) = 1.0;
  spec.a2(2, 3) = 1.0;
  spec.weights.assign(7, 1.0);
  return spec;
}

// Two latent children under the root, two leaves: l1 soft-assigned
// (0.5, 0.5) across the children, l2 hard under child 1.
inline HierarchySpec soft_two_children() {
  HierarchySpec spec;
  spec.num_latent = 3;
  spec.num_observed = 2;
  spec.a1 = Matrix(3, 3, 0.0);
  spec.a1(0, 1) = 1.0;
  spec.a1(0, 2) = 1.0;
  spec.a2 = Matrix(3, 2, 0.0);
  spec.a2(1, 0) = 0.5;
  spec.a2(2, 0) = 0.5;
  spec.a2(1, 1) = 1.0;
  spec.weights.assign(5, 1.0);
  return spec;
}

// One latent node "red" under the root over leaves (apple, paint) with
// absorption row (0.9, 0.5) at the latent node.
inline HierarchySpec apple_paint_spec() {
  HierarchySpec spec;
  spec.num_latent = 2;
  spec.num_observed = 2;
  spec.a1 = Matrix(2, 2, 0.0);
  spec.a1(0, 1) = 1.0;
  spec.a2 = Matrix(2, 2, 0.0);
  spec.a2(0, 0) = 0.1;  // apple mass attached directly to the root
  spec.a2(1, 0) = 0.9;
  spec.a2(0, 1) = 0.5;
  spec.a2(1, 1) = 0.5;
  spec.weights.assign(4, 1.0);
  spec.latent_names = {"root", "red"};
  spec.observed_names = {"apple", "paint"};
  return spec;
}

inline HierarchySpec random_hard(int num_observed, int num_latent,
                                 bool unit_weights, seal::Rng& rng) {
  seal::RandomTreeOptions opts;
  opts.num_observed = num_observed;
  opts.num_latent = num_latent;
  opts.unit_weights = unit_weights;
  return seal::random_hierarchy(opts, rng);
}

inline HierarchySpec random_soft(int num_observed, int num_latent,
                                 seal::Rng& rng) {
  seal::RandomTreeOptions opts;
  opts.num_observed = num_observed;
  opts.num_latent = num_latent;
  opts.soft = true;
  return seal::random_hierarchy(opts, rng);
}

}  // namespace fixtures

#pragma once

#include <cstdint>
#include <random>

#include "seal/matrix.hpp"

namespace seal {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent per-item streams from one seed
// so loops can be reordered or parallelized without changing results.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform point on the probability simplex (Dirichlet(1,...,1)) via
// normalized exponentials.
inline Vec random_simplex_point(int k, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  Vec v(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    v[i] = exp1(rng);
    total += v[i];
  }
  for (int i = 0; i < k; ++i) v[i] /= total;
  return v;
}

}  // namespace seal

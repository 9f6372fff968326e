#pragma once

// Plain cross-entropy SGD trainer, written against the library's documented
// arithmetic order but independent of supervised_step / run_training. Used
// to certify bitwise that the lambda = 0 path performs no extra
// floating-point work (the regularizer is strictly additive).

#include <algorithm>
#include <cmath>

#include "seal/datasynth.hpp"
#include "seal/training.hpp"

namespace plain_ce {

struct ReplicaModel {
  seal::Matrix w;
  seal::Vec b;
};

inline ReplicaModel run(const seal::SplitDataset& data,
                        const seal::TrainConfig& cfg) {
  using seal::Matrix;
  using seal::Vec;
  const int d = static_cast<int>(data.labeled.features[0].size());
  const int k = data.num_classes();
  seal::Rng batch_rng(seal::mix_seed(cfg.seed, 2));
  ReplicaModel m{Matrix(k, d, 0.0), Vec(k, 0.0)};
  Matrix vw(k, d, 0.0);
  Vec vb(k, 0.0);
  const double inv = 1.0 / cfg.batch_size;
  for (int step = 0; step < cfg.steps; ++step) {
    const double lr = seal::scheduled_lr(cfg, step);
    const std::vector<int> idx =
        seal::sample_indices(data.labeled.size(), cfg.batch_size, batch_rng);
    Matrix gw(k, d, 0.0);
    Vec gb(k, 0.0);
    for (int i = 0; i < cfg.batch_size; ++i) {
      const Vec& x = data.labeled.features[idx[i]];
      const int y = data.labeled.labels[idx[i]];
      Vec logits(k);
      for (int c = 0; c < k; ++c) {
        double acc = m.b[c];
        for (int j = 0; j < d; ++j) acc += m.w(c, j) * x[j];
        logits[c] = acc;
      }
      const double peak = *std::max_element(logits.begin(), logits.end());
      Vec p(k);
      double total = 0.0;
      for (int c = 0; c < k; ++c) {
        p[c] = std::exp(logits[c] - peak);
        total += p[c];
      }
      for (int c = 0; c < k; ++c) p[c] /= total;
      for (int c = 0; c < k; ++c) {
        const double g = (p[c] - (c == y ? 1.0 : 0.0)) * inv;
        gb[c] += g;
        for (int j = 0; j < d; ++j) gw(c, j) += g * x[j];
      }
    }
    for (int c = 0; c < k; ++c)
      for (int j = 0; j < d; ++j) {
        vw(c, j) = cfg.momentum * vw(c, j) + gw(c, j);
        m.w(c, j) -= lr * vw(c, j);
      }
    for (int c = 0; c < k; ++c) {
      vb[c] = cfg.momentum * vb[c] + gb[c];
      m.b[c] -= lr * vb[c];
    }
  }
  return m;
}

}  // namespace plain_ce

#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately brute force: dense solves, exhaustive
// enumeration, graph traversals. Nothing in this header may call into the
// code paths it is used to verify.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "seal/hierarchy.hpp"
#include "seal/matrix.hpp"
#include "seal/rng.hpp"

namespace oracle {

using seal::HierarchySpec;
using seal::Matrix;
using seal::Vec;

// ---------------------------------------------------------------------------
// Dense linear solve (Gaussian elimination with partial pivoting); used to
// compute absorption matrices without back-substitution.
inline Matrix dense_solve(Matrix a, Matrix b) {
  const int n = a.rows();
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
    if (a(pivot, col) == 0.0) throw std::runtime_error("singular matrix");
    if (pivot != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
      }
    if (pivot != col)
      for (int j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(pivot, j));
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double factor = a(row, col) / a(col, col);
      if (factor == 0.0) continue;
      for (int j = 0; j < n; ++j) a(row, j) -= factor * a(col, j);
      for (int j = 0; j < b.cols(); ++j) b(row, j) -= factor * b(col, j);
    }
  }
  Matrix x(n, b.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < b.cols(); ++j) x(i, j) = b(i, j) / a(i, i);
  return x;
}

// alpha = (I - A1)^{-1} A2 via the dense solver.
inline Matrix dense_absorption(const HierarchySpec& spec) {
  const int m = spec.num_latent;
  Matrix lhs = Matrix::identity(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) lhs(i, j) -= spec.a1(i, j);
  return dense_solve(lhs, spec.a2);
}

// Latent x observed block of the truncated Neumann series sum_{k=1..N} A^k
// over the full block matrix; exact because A is nilpotent.
inline Matrix neumann_absorption(const HierarchySpec& spec) {
  const int n = spec.total_nodes();
  const int m = spec.num_latent;
  Matrix a(n, n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = spec.a1(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < spec.num_observed; ++j) a(i, m + j) = spec.a2(i, j);

  Matrix power = a;
  Matrix total = a;
  for (int k = 2; k <= n; ++k) {
    Matrix next(n, n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        const double x = power(i, l);
        if (x == 0.0) continue;
        for (int j = 0; j < n; ++j) next(i, j) += x * a(l, j);
      }
    power = next;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) total(i, j) += power(i, j);
  }
  Matrix block(m, spec.num_observed);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < spec.num_observed; ++j) block(i, j) = total(i, m + j);
  return block;
}

// Subtree leaf indicators of a hard spec by explicit child traversal.
inline Matrix subtree_indicators(const HierarchySpec& spec) {
  const int m = spec.num_latent;
  const int k = spec.num_observed;
  Matrix indicator(m, k, 0.0);
  for (int s = 0; s < m; ++s) {
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int r = 0; r < k; ++r)
        if (spec.a2(u, r) == 1.0) indicator(s, r) = 1.0;
      for (int t = u + 1; t < m; ++t)
        if (spec.a1(u, t) == 1.0) stack.push_back(t);
    }
  }
  return indicator;
}

// All-pairs shortest paths by Dijkstra on the undirected weighted tree
// (edge weight = incoming-edge weight of the child node).
inline Matrix dijkstra_metric(const HierarchySpec& spec) {
  const int n = spec.total_nodes();
  const int m = spec.num_latent;
  std::vector<std::vector<std::pair<int, double>>> adjacency(n);
  auto add_edge = [&](int u, int v, double w) {
    adjacency[u].push_back({v, w});
    adjacency[v].push_back({u, w});
  };
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v)
      if (spec.a1(u, v) == 1.0) add_edge(u, v, spec.weights[v]);
    for (int r = 0; r < spec.num_observed; ++r)
      if (spec.a2(u, r) == 1.0) add_edge(u, m + r, spec.weights[m + r]);
  }

  Matrix dist(n, n, 0.0);
  for (int source = 0; source < n; ++source) {
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    d[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : adjacency[u])
        if (du + w < d[v]) {
          d[v] = du + w;
          heap.push({d[v], v});
        }
    }
    for (int v = 0; v < n; ++v) dist(source, v) = d[v];
  }
  return dist;
}

// ---------------------------------------------------------------------------
// SEAL loss evaluated from scratch (dense absorption, stacked extension);
// accepts specs that are slightly off the feasible set, which the finite
// difference probes need.
inline double seal_loss_reference(const HierarchySpec& spec, const Vec& pred,
                                  const Vec& target) {
  const int m = spec.num_latent;
  const int k = spec.num_observed;
  const Matrix alpha = dense_absorption(spec);
  double total = 0.0;
  for (int s = 0; s < m; ++s) {
    double acc = 0.0;
    for (int r = 0; r < k; ++r) acc += alpha(s, r) * (pred[r] - target[r]);
    total += spec.weights[s] * std::abs(acc);
  }
  for (int r = 0; r < k; ++r)
    total += spec.weights[m + r] * std::abs(pred[r] - target[r]);
  return total;
}

inline Vec fd_grad_prediction(const HierarchySpec& spec, const Vec& pred,
                              const Vec& target, double h) {
  Vec grad(pred.size());
  for (size_t j = 0; j < pred.size(); ++j) {
    Vec hi = pred, lo = pred;
    hi[j] += h;
    lo[j] -= h;
    grad[j] = (seal_loss_reference(spec, hi, target) -
               seal_loss_reference(spec, lo, target)) /
              (2.0 * h);
  }
  return grad;
}

inline Matrix fd_grad_a2(const HierarchySpec& spec, const Vec& pred,
                         const Vec& target, double h) {
  Matrix grad(spec.num_latent, spec.num_observed);
  for (int i = 0; i < spec.num_latent; ++i)
    for (int j = 0; j < spec.num_observed; ++j) {
      HierarchySpec hi = spec, lo = spec;
      hi.a2(i, j) += h;
      lo.a2(i, j) -= h;
      grad(i, j) = (seal_loss_reference(hi, pred, target) -
                    seal_loss_reference(lo, pred, target)) /
                   (2.0 * h);
    }
  return grad;
}

// ---------------------------------------------------------------------------
// Exhaustive optimal transport: enumerate every spanning-tree basis of the
// bipartite transport graph (n*m <= 12), solve each by leaf elimination,
// keep the cheapest feasible vertex.
inline double enumerate_transport_cost(const Matrix& cost, const Vec& mu,
                                       const Vec& nu) {
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  const int cells = n * m;
  const int basis_size = n + m - 1;
  if (cells > 12) throw std::runtime_error("enumeration limited to n*m <= 12");

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> chosen(basis_size);

  // Iterate over all cell subsets of size n+m-1 via combinations.
  std::vector<int> comb(basis_size);
  for (int i = 0; i < basis_size; ++i) comb[i] = i;
  while (true) {
    // Solve the candidate basis by repeatedly clearing degree-1 nodes.
    std::vector<double> supply = mu, demand = nu;
    std::vector<std::pair<int, int>> edges;
    for (int c : comb) edges.push_back({c / m, c % m});
    std::vector<int> row_degree(n, 0), col_degree(m, 0);
    for (auto [i, j] : edges) {
      ++row_degree[i];
      ++col_degree[j];
    }
    std::vector<char> used(edges.size(), 0);
    double total_cost = 0.0;
    bool feasible = true;
    for (int round = 0; round < basis_size; ++round) {
      int pick = -1;
      for (size_t e = 0; e < edges.size(); ++e) {
        if (used[e]) continue;
        const auto [i, j] = edges[e];
        if (row_degree[i] == 1 || col_degree[j] == 1) {
          pick = static_cast<int>(e);
          break;
        }
      }
      if (pick < 0) {
        feasible = false;  // a cycle: not a spanning tree
        break;
      }
      const auto [i, j] = edges[pick];
      const double amount = row_degree[i] == 1 ? supply[i] : demand[j];
      if (amount < -1e-9) {
        feasible = false;
        break;
      }
      supply[i] -= amount;
      demand[j] -= amount;
      total_cost += amount * cost(i, j);
      used[pick] = 1;
      --row_degree[i];
      --col_degree[j];
    }
    if (feasible) {
      for (int i = 0; i < n; ++i)
        if (std::abs(supply[i]) > 1e-7) feasible = false;
      for (int j = 0; j < m; ++j)
        if (std::abs(demand[j]) > 1e-7) feasible = false;
    }
    if (feasible) best = std::min(best, total_cost);

    // next combination
    int pos = basis_size - 1;
    while (pos >= 0 && comb[pos] == cells - basis_size + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int t = pos + 1; t < basis_size; ++t) comb[t] = comb[t - 1] + 1;
  }
  if (!std::isfinite(best))
    throw std::runtime_error("no feasible transport vertex found");
  return best;
}

// ---------------------------------------------------------------------------
// Simplex projection solved exactly by support-set enumeration.
inline Vec qp_project_simplex(const Vec& y) {
  const int n = static_cast<int>(y.size());
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        sum += y[i];
        ++count;
      }
    const double tau = (sum - 1.0) / count;
    Vec candidate(n, 0.0);
    bool feasible = true;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1 << i))) continue;
      candidate[i] = y[i] - tau;
      if (candidate[i] < -1e-12) feasible = false;
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = candidate[i] - y[i];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = candidate;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Clustering helpers for the hierarchy-recovery experiment.

inline double adjusted_rand_index(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  const int ka = 1 + *std::max_element(a.begin(), a.end());
  const int kb = 1 + *std::max_element(b.begin(), b.end());
  std::vector<std::vector<int>> table(ka, std::vector<int>(kb, 0));
  for (int i = 0; i < n; ++i) ++table[a[i]][b[i]];

  auto choose2 = [](long long x) { return x * (x - 1) / 2.0; };
  double index = 0.0, row_sum = 0.0, col_sum = 0.0;
  for (int i = 0; i < ka; ++i) {
    long long row = 0;
    for (int j = 0; j < kb; ++j) {
      index += choose2(table[i][j]);
      row += table[i][j];
    }
    row_sum += choose2(row);
  }
  for (int j = 0; j < kb; ++j) {
    long long col = 0;
    for (int i = 0; i < ka; ++i) col += table[i][j];
    col_sum += choose2(col);
  }
  const double expected = row_sum * col_sum / choose2(n);
  const double maximum = 0.5 * (row_sum + col_sum);
  if (maximum == expected) return 1.0;  // degenerate: one cluster each side
  return (index - expected) / (maximum - expected);
}

// Plain Lloyd k-means over a handful of points with restarts; returns the
// best assignment by inertia.
inline std::vector<int> kmeans_assign(const std::vector<Vec>& points, int k,
                                      int restarts, uint64_t seed) {
  const int n = static_cast<int>(points.size());
  const int dim = static_cast<int>(points[0].size());
  std::vector<int> best_assign(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();
  seal::Rng rng(seed);

  for (int attempt = 0; attempt < restarts; ++attempt) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Vec> centers;
    for (int c = 0; c < k; ++c) centers.push_back(points[order[c]]);

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int nearest = 0;
        double nearest_dist = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double d = 0.0;
          for (int t = 0; t < dim; ++t) {
            const double diff = points[i][t] - centers[c][t];
            d += diff * diff;
          }
          if (d < nearest_dist) {
            nearest_dist = d;
            nearest = c;
          }
        }
        if (assign[i] != nearest) {
          assign[i] = nearest;
          changed = true;
        }
      }
      for (int c = 0; c < k; ++c) {
        Vec mean(dim, 0.0);
        int count = 0;
        for (int i = 0; i < n; ++i)
          if (assign[i] == c) {
            ++count;
            for (int t = 0; t < dim; ++t) mean[t] += points[i][t];
          }
        if (count > 0)
          for (int t = 0; t < dim; ++t) centers[c][t] = mean[t] / count;
      }
      if (!changed) break;
    }
    double inertia = 0.0;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < dim; ++t) {
        const double diff = points[i][t] - centers[assign[i]][t];
        inertia += diff * diff;
      }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assign = assign;
    }
  }
  return best_assign;
}

}  // namespace oracle

#include "seal/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "seal/parallel.hpp"
#include "seal/rng.hpp"

namespace seal {

namespace {

constexpr double kMarginalTol = 1e-9;
constexpr double kReducedCostTol = 1e-12;
constexpr int kOracleCap = 64;

void check_pair(const HierarchySpec& spec, const Vec& mu, const Vec& nu) {
  require_valid(spec);
  require_prob_vector(mu, "mu");
  require_prob_vector(nu, "nu");
  if (static_cast<int>(mu.size()) != spec.num_observed ||
      static_cast<int>(nu.size()) != spec.num_observed)
    throw ValidationError("measure length does not match num_observed");
}

}  // namespace

double tree_wasserstein(const HierarchySpec& spec, const Vec& mu,
                        const Vec& nu) {
  check_pair(spec, mu, nu);
  if (!spec.is_hard())
    throw ValidationError("tree_wasserstein requires a hard spec",
                          {{"mode", -1, -1, "spec is soft"}});
  double total = 0.0;
  for (int v = 0; v < spec.total_nodes(); ++v)
    total += spec.weights[v] *
             std::abs(subtree_mass(spec, mu, v) - subtree_mass(spec, nu, v));
  return total;
}

RtwEvaluator::RtwEvaluator(const HierarchySpec& spec)
    : weights_(spec.weights) {
  require_valid(spec);
  const int m = spec.num_latent;
  const int k = spec.num_observed;
  const Matrix alpha = absorption(spec);
  extension_ = Matrix(m + k, k);
  for (int s = 0; s < m; ++s)
    for (int r = 0; r < k; ++r) extension_(s, r) = alpha(s, r);
  for (int r = 0; r < k; ++r) extension_(m + r, r) = 1.0;
}

double RtwEvaluator::distance(const Vec& mu, const Vec& nu) const {
  const int k = extension_.cols();
  Vec diff(k);
  for (int r = 0; r < k; ++r) diff[r] = mu[r] - nu[r];
  const Vec lifted = extension_.multiply(diff);
  double total = 0.0;
  for (int v = 0; v < extension_.rows(); ++v)
    total += weights_[v] * std::abs(lifted[v]);
  return total;
}

double relaxed_tree_wasserstein(const HierarchySpec& spec, const Vec& mu,
                                const Vec& nu) {
  check_pair(spec, mu, nu);
  return RtwEvaluator(spec).distance(mu, nu);
}

// ---------------------------------------------------------------------------
// Transportation simplex

namespace {

struct Cell {
  int i;
  int j;
  double alloc;
};

// Spanning-tree basis over row nodes [0,n) and column nodes [n, n+m).
struct Basis {
  int n, m;
  std::vector<Cell> cells;                 // exactly n + m - 1 entries
  std::vector<std::vector<int>> adjacency; // node -> indices into cells

  void rebuild_adjacency() {
    adjacency.assign(n + m, {});
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
      adjacency[cells[c].i].push_back(c);
      adjacency[n + cells[c].j].push_back(c);
    }
  }
};

// Northwest-corner start: walk from (0,0) to (n-1,m-1) moving right or down,
// allocating min(remaining supply, remaining demand) at each visited cell.
// Visits exactly n + m - 1 cells, so the basis is a spanning tree even when
// some allocations are zero.
Basis northwest_corner(Vec supply, Vec demand) {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  Basis basis{n, m, {}, {}};
  int i = 0, j = 0;
  while (true) {
    const double amount = std::min(supply[i], demand[j]);
    basis.cells.push_back({i, j, amount});
    supply[i] -= amount;
    demand[j] -= amount;
    if (i == n - 1 && j == m - 1) break;
    if (i == n - 1) {
      ++j;
    } else if (j == m - 1) {
      ++i;
    } else if (supply[i] <= demand[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  basis.rebuild_adjacency();
  return basis;
}

// Dual prices from the basis tree: u_i + v_j = c_ij on basic cells.
void solve_duals(const Basis& basis, const Matrix& cost, Vec& u, Vec& v) {
  const int n = basis.n, m = basis.m;
  u.assign(n, 0.0);
  v.assign(m, 0.0);
  std::vector<char> seen(n + m, 0);
  std::queue<int> frontier;
  seen[0] = 1;
  frontier.push(0);
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop();
    for (int c : basis.adjacency[node]) {
      const Cell& cell = basis.cells[c];
      const int other = (node < n) ? n + cell.j : cell.i;
      if (seen[other]) continue;
      if (node < n)
        v[cell.j] = cost(cell.i, cell.j) - u[cell.i];
      else
        u[cell.i] = cost(cell.i, cell.j) - v[cell.j];
      seen[other] = 1;
      frontier.push(other);
    }
  }
}

// Unique path between two nodes of the basis tree, as a list of cell
// indices. Used to close the pivot cycle through the entering cell.
std::vector<int> tree_path(const Basis& basis, int from, int to) {
  const int nodes = basis.n + basis.m;
  std::vector<int> via_cell(nodes, -1), prev(nodes, -1);
  std::vector<char> seen(nodes, 0);
  std::queue<int> frontier;
  seen[from] = 1;
  frontier.push(from);
  while (!frontier.empty() && !seen[to]) {
    const int node = frontier.front();
    frontier.pop();
    for (int c : basis.adjacency[node]) {
      const Cell& cell = basis.cells[c];
      const int other = (node < basis.n) ? basis.n + cell.j : cell.i;
      if (seen[other]) continue;
      seen[other] = 1;
      prev[other] = node;
      via_cell[other] = c;
      frontier.push(other);
    }
  }
  std::vector<int> path;
  for (int node = to; node != from; node = prev[node])
    path.push_back(via_cell[node]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TransportPlan lp_wasserstein_oracle(const Matrix& cost, const Vec& mu,
                                    const Vec& nu) {
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  if (n == 0 || m == 0)
    throw ValidationError("lp_wasserstein_oracle: empty marginals");
  if (n > kOracleCap || m > kOracleCap)
    throw ValidationError("lp_wasserstein_oracle: support larger than 64");
  if (cost.rows() != n || cost.cols() != m)
    throw ValidationError("lp_wasserstein_oracle: cost matrix shape mismatch");
  for (double c : cost.data())
    if (!std::isfinite(c) || c < 0.0)
      throw ValidationError(
          "lp_wasserstein_oracle: cost entries must be finite and >= 0");
  double total_mu = 0.0, total_nu = 0.0;
  for (double x : mu) {
    if (x < 0.0) throw ValidationError("lp_wasserstein_oracle: negative mass");
    total_mu += x;
  }
  for (double x : nu) {
    if (x < 0.0) throw ValidationError("lp_wasserstein_oracle: negative mass");
    total_nu += x;
  }
  if (std::abs(total_mu - total_nu) > kMarginalTol)
    throw ValidationError("lp_wasserstein_oracle: marginal sums differ by " +
                          std::to_string(std::abs(total_mu - total_nu)));

  // Absorb the residual imbalance (<= 1e-9) into the largest demand so the
  // flow accounting closes exactly.
  Vec demand = nu;
  demand[std::max_element(demand.begin(), demand.end()) - demand.begin()] +=
      total_mu - total_nu;

  Basis basis = northwest_corner(mu, demand);
  Vec u, v;
  const int max_iters = 2000 * (n + m);
  const int bland_after = 200 * (n + m);

  for (int iter = 0;; ++iter) {
    if (iter >= max_iters)
      throw std::runtime_error("transportation simplex failed to converge");
    solve_duals(basis, cost, u, v);

    std::vector<char> basic(static_cast<size_t>(n) * m, 0);
    for (const Cell& cell : basis.cells)
      basic[static_cast<size_t>(cell.i) * m + cell.j] = 1;

    // Entering cell: most negative reduced cost, lexicographic tie-break.
    // After long stalls switch to Bland's rule (first negative) to rule out
    // cycling on degenerate instances.
    const bool bland = iter > bland_after;
    int enter_i = -1, enter_j = -1;
    double best = -kReducedCostTol;
    for (int i = 0; i < n && (enter_i < 0 || !bland); ++i)
      for (int j = 0; j < m; ++j) {
        if (basic[static_cast<size_t>(i) * m + j]) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          enter_i = i;
          enter_j = j;
          if (bland) break;
        }
      }
    if (enter_i < 0) break;  // optimal

    // Pivot cycle: entering cell plus the tree path col(enter_j)->row(enter_i).
    // Walking from the entering cell, signs alternate -,+,-,... along the path.
    const std::vector<int> path = tree_path(basis, n + enter_j, enter_i);
    double theta = std::numeric_limits<double>::infinity();
    int leaving_pos = -1;
    for (size_t t = 0; t < path.size(); t += 2) {
      const Cell& cell = basis.cells[path[t]];
      if (cell.alloc < theta ||
          (cell.alloc == theta && leaving_pos >= 0 &&
           std::pair(cell.i, cell.j) < std::pair(basis.cells[path[leaving_pos]].i,
                                                 basis.cells[path[leaving_pos]].j))) {
        theta = cell.alloc;
        leaving_pos = static_cast<int>(t);
      }
    }

    for (size_t t = 0; t < path.size(); ++t) {
      Cell& cell = basis.cells[path[t]];
      cell.alloc += (t % 2 == 0) ? -theta : theta;
      if (cell.alloc < 0.0) cell.alloc = 0.0;  // kill rounding residue
    }
    Cell& replaced = basis.cells[path[leaving_pos]];
    replaced = {enter_i, enter_j, theta};
    basis.rebuild_adjacency();
  }

  TransportPlan result;
  result.plan = Matrix(n, m, 0.0);
  for (const Cell& cell : basis.cells) result.plan(cell.i, cell.j) += cell.alloc;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) total += result.plan(i, j) * cost(i, j);
  result.cost = total;
  return result;
}

// ---------------------------------------------------------------------------

NegdefReport negdef_check(const HierarchySpec& spec,
                          const std::vector<Vec>& samples, int trials,
                          uint64_t seed) {
  if (samples.size() < 2)
    throw ValidationError("negdef_check needs at least 2 samples");
  require_valid(spec);
  for (size_t i = 0; i < samples.size(); ++i)
    require_prob_vector(samples[i], "sample " + std::to_string(i));

  const RtwEvaluator evaluator(spec);
  const int n = static_cast<int>(samples.size());
  Matrix gram(n, n, 0.0);
  parallel_for(n * n, [&](int flat) {
    const int i = flat / n, j = flat % n;
    if (i < j) gram(i, j) = evaluator.distance(samples[i], samples[j]);
  });
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      gram(j, i) = gram(i, j);
      scale = std::max(scale, std::abs(gram(i, j)));
    }

  NegdefReport report;
  report.gram_scale = scale;
  report.trials = trials;
  report.max_violation = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec c(n);
  for (int t = 0; t < trials; ++t) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      c[i] = gauss(rng);
      mean += c[i];
    }
    mean /= n;
    for (int i = 0; i < n; ++i) c[i] -= mean;  // zero-sum coefficients
    double quad = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) quad += c[i] * c[j] * gram(i, j);
    report.max_violation = std::max(report.max_violation, quad);
  }
  if (trials == 0) report.max_violation = 0.0;
  report.pass = report.max_violation <= 1e-10 * report.gram_scale;
  return report;
}

int rtw_knn(const RtwEvaluator& evaluator,
            const std::vector<std::pair<Vec, int>>& train, const Vec& query,
            int k) {
  if (train.empty()) throw ValidationError("rtw_knn: empty training set");
  if (k < 1 || k > static_cast<int>(train.size()))
    throw ValidationError("rtw_knn: k must be in [1, train size]");

  std::vector<std::pair<double, int>> order;  // (distance, train index)
  order.reserve(train.size());
  for (size_t t = 0; t < train.size(); ++t)
    order.emplace_back(evaluator.distance(train[t].first, query),
                       static_cast<int>(t));
  // stable sort keeps training order among equal distances
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<int> votes;
  for (int t = 0; t < k; ++t) {
    const int label = train[order[t].second].second;
    if (label >= static_cast<int>(votes.size())) votes.resize(label + 1, 0);
    ++votes[label];
  }
  int winner = 0, best = -1;
  for (size_t label = 0; label < votes.size(); ++label)
    if (votes[label] > best) {  // strict: vote ties keep the smallest label
      best = votes[label];
      winner = static_cast<int>(label);
    }
  return winner;
}

int rtw_knn(const HierarchySpec& spec,
            const std::vector<std::pair<Vec, int>>& train, const Vec& query,
            int k) {
  RtwEvaluator evaluator(spec);
  require_prob_vector(query, "query");
  for (size_t t = 0; t < train.size(); ++t)
    require_prob_vector(train[t].first, "train " + std::to_string(t));
  return rtw_knn(evaluator, train, query, k);
}

}  // namespace seal

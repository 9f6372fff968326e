#include "seal/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seal {

namespace {

constexpr double kColumnSumTol = 1e-8;   // simplex projections round at this scale
constexpr double kEntryRangeTol = 1e-10;
constexpr double kProbSumTol = 1e-8;

bool is_binary(double x) { return x == 0.0 || x == 1.0; }

void push_issue(std::vector<ValidationIssue>& issues, std::string code, int row,
                int col, std::string message) {
  issues.push_back({std::move(code), row, col, std::move(message)});
}

}  // namespace

bool HierarchySpec::is_hard() const {
  for (double x : a2.data())
    if (!is_binary(x)) return false;
  return true;
}

std::string HierarchySpec::observed_name(int leaf) const {
  if (leaf >= 0 && leaf < static_cast<int>(observed_names.size()))
    return observed_names[leaf];
  return "leaf_" + std::to_string(leaf);
}

std::string HierarchySpec::latent_name(int node) const {
  if (node >= 0 && node < static_cast<int>(latent_names.size()))
    return latent_names[node];
  return node == 0 ? "root" : "latent_" + std::to_string(node);
}

std::string ValidationReport::to_string() const {
  if (ok) return "ok";
  std::ostringstream out;
  for (size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    out << issues[i].message;
  }
  return out.str();
}

ValidationReport validate_adjacency(const HierarchySpec& spec) {
  ValidationReport report;
  auto& issues = report.issues;

  const int m = spec.num_latent;
  const int k = spec.num_observed;

  // Structural checks first; condition checks make no sense on wrong shapes.
  if (m <= 0 || k <= 0) {
    push_issue(issues, "structure", -1, -1,
               "num_latent and num_observed must be positive");
    return report;
  }
  if (spec.a1.rows() != m || spec.a1.cols() != m)
    push_issue(issues, "structure", -1, -1,
               "A1 must be " + std::to_string(m) + "x" + std::to_string(m));
  if (spec.a2.rows() != m || spec.a2.cols() != k)
    push_issue(issues, "structure", -1, -1,
               "A2 must be " + std::to_string(m) + "x" + std::to_string(k));
  if (static_cast<int>(spec.weights.size()) != m + k)
    push_issue(issues, "structure", -1, -1,
               "weights must have length " + std::to_string(m + k));
  if (!issues.empty()) return report;

  const bool hard = spec.is_hard();

  // Condition 1: strict upper triangularity of the block matrix, which
  // reduces to A1 (the observed rows are zero by construction).
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j)
      if (spec.a1(i, j) != 0.0)
        push_issue(issues, "condition1", i, j,
                   "condition 1 violated at A1[" + std::to_string(i) + "][" +
                       std::to_string(j) + "]: not strictly upper triangular");

  // Entry ranges: A1 stays hard in both modes; A2 relaxes to [0,1] when soft.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (!is_binary(spec.a1(i, j)))
        push_issue(issues, "entry_range", i, j,
                   "A1[" + std::to_string(i) + "][" + std::to_string(j) +
                       "] must be 0 or 1");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double x = spec.a2(i, j);
      const bool bad = hard ? !is_binary(x)
                            : (x < -kEntryRangeTol || x > 1.0 + kEntryRangeTol);
      if (bad)
        push_issue(issues, "entry_range", i, j,
                   "A2[" + std::to_string(i) + "][" + std::to_string(j) +
                       "] outside " + (hard ? "{0,1}" : "[0,1]"));
    }

  // Condition 2: column sums of the block matrix are (0,1,...,1).
  {
    double root_sum = 0.0;
    for (int i = 0; i < m; ++i) root_sum += spec.a1(i, 0);
    if (std::abs(root_sum) > kColumnSumTol)
      push_issue(issues, "condition2", -1, 0,
                 "condition 2 violated at column 0: root column sum " +
                     std::to_string(root_sum) + " != 0");
  }
  for (int j = 1; j < m; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += spec.a1(i, j);
    if (std::abs(sum - 1.0) > kColumnSumTol)
      push_issue(issues, "condition2", -1, j,
                 "condition 2 violated at column " + std::to_string(j) +
                     ": sum " + std::to_string(sum) + " != 1");
  }
  for (int j = 0; j < k; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += spec.a2(i, j);
    if (std::abs(sum - 1.0) > kColumnSumTol)
      push_issue(issues, "condition2", -1, m + j,
                 "condition 2 violated at column " + std::to_string(m + j) +
                     ": sum " + std::to_string(sum) + " != 1");
  }

  for (int v = 0; v < m + k; ++v)
    if (spec.weights[v] < 0.0)
      push_issue(issues, "negative_weight", v, -1,
                 "weight of node " + std::to_string(v) + " is negative");

  report.ok = issues.empty();
  return report;
}

void require_valid(const HierarchySpec& spec) {
  ValidationReport report = validate_adjacency(spec);
  if (!report.ok)
    throw ValidationError("invalid hierarchy: " + report.to_string(),
                          report.issues);
}

ValidationReport validate_prob_vector(const Vec& p) {
  ValidationReport report;
  if (p.empty()) {
    push_issue(report.issues, "structure", -1, -1,
               "probability vector is empty");
    return report;
  }
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= -1e-12) || !std::isfinite(p[i]))
      push_issue(report.issues, "negative_entry", static_cast<int>(i), -1,
                 "entry " + std::to_string(i) + " is negative or non-finite");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kProbSumTol)
    push_issue(report.issues, "sum", -1, -1,
               "entries sum to " + std::to_string(sum) + ", expected 1");
  report.ok = report.issues.empty();
  return report;
}

void require_prob_vector(const Vec& p, const std::string& name) {
  ValidationReport report = validate_prob_vector(p);
  if (!report.ok)
    throw ValidationError("invalid probability vector '" + name +
                              "': " + report.to_string(),
                          report.issues);
}

Matrix absorption(const HierarchySpec& spec) {
  const int m = spec.num_latent;
  const int k = spec.num_observed;
  // Solve (I - A1) X = A2 bottom-up: row i needs only rows j > i.
  Matrix x = spec.a2;
  for (int i = m - 1; i >= 0; --i)
    for (int j = i + 1; j < m; ++j) {
      const double a = spec.a1(i, j);
      if (a == 0.0) continue;
      for (int r = 0; r < k; ++r) x(i, r) += a * x(j, r);
    }
  return x;
}

Matrix latent_walk(const HierarchySpec& spec) {
  const int m = spec.num_latent;
  Matrix b = Matrix::identity(m);
  for (int i = m - 1; i >= 0; --i)
    for (int j = i + 1; j < m; ++j) {
      const double a = spec.a1(i, j);
      if (a == 0.0) continue;
      for (int t = 0; t < m; ++t) b(i, t) += a * b(j, t);
    }
  return b;
}

std::vector<int> parent_of(const HierarchySpec& spec) {
  if (!spec.is_hard())
    throw ValidationError("parent_of requires a hard spec",
                          {{"mode", -1, -1, "spec is soft"}});
  const int m = spec.num_latent;
  const int n = spec.total_nodes();
  std::vector<int> parent(n, -1);
  for (int v = 1; v < m; ++v)
    for (int u = 0; u < m; ++u)
      if (spec.a1(u, v) == 1.0) parent[v] = u;
  for (int r = 0; r < spec.num_observed; ++r)
    for (int u = 0; u < m; ++u)
      if (spec.a2(u, r) == 1.0) parent[m + r] = u;
  return parent;
}

Matrix tree_metric(const HierarchySpec& spec) {
  if (!spec.is_hard())
    throw ValidationError("tree_metric requires a hard spec",
                          {{"mode", -1, -1, "spec is soft"}});
  const int n = spec.total_nodes();
  const std::vector<int> parent = parent_of(spec);

  std::vector<int> depth(n, 0);
  for (int v = 1; v < n; ++v) {
    int d = 0;
    for (int u = v; parent[u] != -1; u = parent[u]) ++d;
    depth[v] = d;
  }

  Matrix dist(n, n, 0.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      int a = u, b = v;
      double d = 0.0;
      // Climb the deeper endpoint until the paths meet; each step crosses
      // the incoming edge of the node being lifted.
      while (a != b) {
        if (depth[a] >= depth[b]) {
          d += spec.weights[a];
          a = parent[a];
        } else {
          d += spec.weights[b];
          b = parent[b];
        }
      }
      dist(u, v) = d;
      dist(v, u) = d;
    }
  return dist;
}

double subtree_mass(const HierarchySpec& spec, const Vec& mu, int node) {
  if (!spec.is_hard())
    throw ValidationError("subtree_mass requires a hard spec",
                          {{"mode", -1, -1, "spec is soft"}});
  const int m = spec.num_latent;
  const int n = spec.total_nodes();
  if (node < 0 || node >= n)
    throw ValidationError("subtree_mass: node index " + std::to_string(node) +
                              " out of range [0," + std::to_string(n) + ")",
                          {{"structure", node, -1, "node index out of range"}});
  if (static_cast<int>(mu.size()) != spec.num_observed)
    throw ValidationError("subtree_mass: mu has wrong length");

  if (node >= m) return mu[node - m];

  // DFS over latent children, accumulating observed-leaf mass.
  double total = 0.0;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int r = 0; r < spec.num_observed; ++r)
      if (spec.a2(s, r) == 1.0) total += mu[r];
    for (int t = s + 1; t < m; ++t)
      if (spec.a1(s, t) == 1.0) stack.push_back(t);
  }
  return total;
}

HierarchySpec harden(const HierarchySpec& spec) {
  HierarchySpec out = spec;
  for (int r = 0; r < spec.num_observed; ++r) {
    int best = 0;
    for (int s = 1; s < spec.num_latent; ++s)
      if (spec.a2(s, r) > spec.a2(best, r)) best = s;  // ties keep lowest index
    for (int s = 0; s < spec.num_latent; ++s)
      out.a2(s, r) = (s == best) ? 1.0 : 0.0;
  }
  return out;
}

HierarchySpec random_hierarchy(const RandomTreeOptions& opts, Rng& rng) {
  const int m = opts.num_latent;
  const int k = opts.num_observed;
  HierarchySpec spec;
  spec.num_latent = m;
  spec.num_observed = k;
  spec.a1 = Matrix(m, m);
  spec.a2 = Matrix(m, k);
  spec.weights.assign(m + k, 1.0);

  std::vector<int> depth(m, 0);
  for (int v = 1; v < m; ++v) {
    // Eligible parents keep the index order (strict upper triangularity)
    // and, when capped, the depth budget: leaves sit one level below their
    // latent parent.
    std::vector<int> eligible;
    for (int u = 0; u < v; ++u)
      if (opts.max_depth <= 0 || depth[u] < opts.max_depth - 1)
        eligible.push_back(u);
    if (eligible.empty()) eligible.push_back(0);
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(eligible.size()) - 1);
    const int parent = eligible[pick(rng)];
    spec.a1(parent, v) = 1.0;
    depth[v] = depth[parent] + 1;
  }

  if (opts.soft) {
    for (int r = 0; r < k; ++r) {
      Vec col = random_simplex_point(m, rng);
      if (opts.root_mass_scale != 1.0 && m > 1) {
        col[0] *= opts.root_mass_scale;
        double total = 0.0;
        for (double c : col) total += c;
        for (double& c : col) c /= total;
      }
      for (int s = 0; s < m; ++s) spec.a2(s, r) = col[s];
    }
  } else {
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (int r = 0; r < k; ++r) spec.a2(pick(rng), r) = 1.0;
  }

  if (!opts.unit_weights) {
    std::uniform_real_distribution<double> w(opts.min_weight, opts.max_weight);
    for (int v = 0; v < m + k; ++v) spec.weights[v] = w(rng);
  }
  return spec;
}

}  // namespace seal

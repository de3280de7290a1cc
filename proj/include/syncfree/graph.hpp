#pragma once

#include <string>
#include <vector>

#include "syncfree/linalg.hpp"

namespace syncfree {

// Directed communication network. weights(i, j) = a_ij is the weight of the
// edge from node j to node i; a_ij = 0 means no edge, a_ii = 0 always.
struct WeightedDigraph {
  int n_agents = 0;
  MatrixXd weights;

  void validate() const {
    if (n_agents < 1 || weights.rows() != n_agents || weights.cols() != n_agents)
      throw DimensionMismatch("adjacency matrix must be n x n with n >= 1");
    for (int i = 0; i < n_agents; ++i) {
      if (weights(i, i) != 0.0) throw Error("self-loop at node " + std::to_string(i));
      for (int j = 0; j < n_agents; ++j)
        if (weights(i, j) < 0.0) throw Error("negative edge weight at (" + std::to_string(j) +
                                             " -> " + std::to_string(i) + ")");
    }
  }

  double in_degree(int i) const { return weights.row(i).sum(); }
};

struct LaplacianMatrix {
  MatrixXd entries;
  int n() const { return static_cast<int>(entries.rows()); }
};

struct LocalBounds {
  VectorXd q;
};

struct RowStochasticMatrix {
  MatrixXd entries;
  int n() const { return static_cast<int>(entries.rows()); }
};

inline LaplacianMatrix build_laplacian(const WeightedDigraph& g) {
  g.validate();
  LaplacianMatrix l;
  l.entries = -g.weights;
  for (int i = 0; i < g.n_agents; ++i) l.entries(i, i) = g.weights.row(i).sum();
  return l;
}

// True iff some node has a directed path to every other node. Edges are
// combinatorial: any a_ij > 0 counts. Plain BFS sweep per candidate root.
inline bool has_directed_spanning_tree(const WeightedDigraph& g) {
  g.validate();
  const int n = g.n_agents;
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.weights(i, j) > 0.0) out[j].push_back(i);  // edge j -> i
  std::vector<int> stack, seen(n);
  for (int root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, root);
    seen[root] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : out[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
    }
    if (count == n) return true;
  }
  return false;
}

inline std::vector<Complex> laplacian_spectrum(const LaplacianMatrix& l) {
  return spectrum(l.entries);
}

// Number of eigenvalues within tol of zero; tol defaults to 1e-7 relative to
// the matrix norm (with a floor of 1 for near-zero matrices).
inline int zero_eigenvalue_multiplicity(const LaplacianMatrix& l, double tol = -1.0) {
  if (tol < 0) tol = kBoundaryTol * std::max(1.0, l.entries.cwiseAbs().rowwise().sum().maxCoeff());
  int k = 0;
  for (const auto& z : laplacian_spectrum(l))
    if (std::abs(z) <= tol) ++k;
  return k;
}

inline RowStochasticMatrix to_row_stochastic(const WeightedDigraph& g, const LocalBounds& q) {
  g.validate();
  if (q.q.size() != g.n_agents) throw DimensionMismatch("bounds vector length must equal n");
  for (int i = 0; i < g.n_agents; ++i) {
    double din = g.in_degree(i);
    if (!(q.q(i) > din)) throw BoundViolation(i, q.q(i), din);
  }
  RowStochasticMatrix d;
  d.entries = MatrixXd::Zero(g.n_agents, g.n_agents);
  for (int i = 0; i < g.n_agents; ++i) {
    double off = 0.0;
    for (int j = 0; j < g.n_agents; ++j) {
      if (i == j) continue;
      d.entries(i, j) = g.weights(i, j) / (1.0 + q.q(i));
      off += d.entries(i, j);
    }
    d.entries(i, i) = 1.0 - off;
  }
  return d;
}

inline std::vector<Complex> row_stochastic_spectrum(const RowStochasticMatrix& d) {
  return spectrum(d.entries);
}

inline LocalBounds bounds_from_in_degree(const WeightedDigraph& g, double offset) {
  LocalBounds b;
  b.q.resize(g.n_agents);
  for (int i = 0; i < g.n_agents; ++i) b.q(i) = g.in_degree(i) + offset;
  return b;
}

enum class GraphKind { cycle, path, star, complete, random_spanning_tree };

inline GraphKind parse_graph_kind(const std::string& s) {
  if (s == "cycle") return GraphKind::cycle;
  if (s == "path") return GraphKind::path;
  if (s == "star") return GraphKind::star;
  if (s == "complete") return GraphKind::complete;
  if (s == "random_spanning_tree") return GraphKind::random_spanning_tree;
  throw ParseError("unknown graph kind '" + s + "'");
}

inline std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::cycle: return "cycle";
    case GraphKind::path: return "path";
    case GraphKind::star: return "star";
    case GraphKind::complete: return "complete";
    case GraphKind::random_spanning_tree: return "random_spanning_tree";
  }
  return "?";
}

// Deterministic graph generator. Weights are drawn uniformly from
// [weight_lo, weight_hi]. random_spanning_tree first builds a random
// arborescence over a random node order (so the result always contains a
// directed spanning tree), then adds each remaining edge with probability 0.2.
inline WeightedDigraph generate(GraphKind kind, int n, std::uint64_t seed, double weight_lo,
                                double weight_hi) {
  if (n < 1) throw Error("graph size must be >= 1");
  if (weight_lo < 0.0 || weight_hi < weight_lo) throw Error("invalid weight range");
  Rng rng(seed * 0x9e3779b9u + 12345u + static_cast<std::uint64_t>(n));
  WeightedDigraph g;
  g.n_agents = n;
  g.weights = MatrixXd::Zero(n, n);
  auto w = [&] { return rng.uniform(weight_lo, weight_hi); };
  switch (kind) {
    case GraphKind::cycle:
      if (n > 1)
        for (int j = 0; j < n; ++j) g.weights((j + 1) % n, j) = w();
      break;
    case GraphKind::path:
      for (int j = 0; j + 1 < n; ++j) g.weights(j + 1, j) = w();
      break;
    case GraphKind::star:
      for (int i = 1; i < n; ++i) g.weights(i, 0) = w();
      break;
    case GraphKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) g.weights(i, j) = w();
      break;
    case GraphKind::random_spanning_tree: {
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
      for (int idx = 1; idx < n; ++idx) {
        int child = order[idx];
        int parent = order[rng.below(idx)];
        g.weights(child, parent) = w();
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && g.weights(i, j) == 0.0 && rng.uniform01() < 0.2) g.weights(i, j) = w();
      break;
    }
  }
  return g;
}

}  // namespace syncfree

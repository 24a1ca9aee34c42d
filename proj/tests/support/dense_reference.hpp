#pragma once

// Dense, deliberately naive references for small graphs. Everything here is
// built from the adjacency matrix directly so it shares no code with the
// sparse operators under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "scatclique/graph.hpp"
#include "scatclique/matrix.hpp"

namespace testref {

using scatclique::Graph;
using scatclique::Matrix;
using scatclique::NodeId;

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edge_list(edges, n);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edge_list(edges, n);
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (double& v : m.data()) v = u(rng);
  return m;
}

inline Matrix adjacency(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix w(n, n);
  for (auto [u, v] : g.edges()) {
    w(u, v) = 1.0;
    w(v, u) = 1.0;
  }
  return w;
}

inline Matrix complement(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix w = adjacency(g);
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c(i, j) = (i != j && w(i, j) == 0.0) ? 1.0 : 0.0;
  }
  return c;
}

inline Matrix identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

inline Matrix power(const Matrix& a, int t) {
  Matrix out = identity(a.rows());
  for (int i = 0; i < t; ++i) out = scatclique::matmul(out, a);
  return out;
}

// 1/2 (I + W D^-1), with isolated columns replaced by e_v.
inline Matrix lazy_walk(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix w = adjacency(g);
  Matrix p(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += w(i, j);
    for (std::size_t i = 0; i < n; ++i) {
      const double step = d > 0.0 ? w(i, j) / d : (i == j ? 1.0 : 0.0);
      p(i, j) = 0.5 * ((i == j ? 1.0 : 0.0) + step);
    }
  }
  return p;
}

inline Matrix wavelet(const Graph& g, int k) {
  const Matrix p = lazy_walk(g);
  if (k == 0) return identity(g.node_count()) - p;
  return power(p, 1 << (k - 1)) - power(p, 1 << k);
}

inline Matrix renorm_adj(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix w = adjacency(g) + identity(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += w(i, j);
    s[i] = 1.0 / std::sqrt(d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w(i, j) *= s[i] * s[j];
  }
  return w;
}

inline double quad(const Matrix& m, const std::vector<double>& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) total += p[i] * m(i, j) * p[j];
  }
  return total;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

// Subset encoded as a bitmask over the first 32 nodes.
inline bool mask_is_clique(const Graph& g, std::uint32_t mask) {
  const std::size_t n = g.node_count();
  for (NodeId u = 0; u < n; ++u) {
    if (!(mask >> u & 1U)) continue;
    for (NodeId v = u + 1; v < n; ++v) {
      if ((mask >> v & 1U) && !g.has_edge(u, v)) return false;
    }
  }
  return true;
}

inline std::size_t brute_force_clique_size(const Graph& g) {
  const std::size_t n = g.node_count();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size > best && mask_is_clique(g, mask)) best = size;
  }
  return best;
}

// Is the subset contained in some clique of g? For a subset this is the same
// as being a clique itself; enumerating supersets keeps the oracle literal.
inline bool contained_in_some_clique(const Graph& g, std::uint32_t mask) {
  const std::size_t n = g.node_count();
  const std::uint32_t full = (1U << n) - 1U;
  const std::uint32_t rest = full & ~mask;
  for (std::uint32_t extra = rest;; extra = (extra - 1) & rest) {
    if (mask_is_clique(g, mask | extra)) return true;
    if (extra == 0) break;
  }
  return false;
}

inline std::vector<NodeId> mask_nodes(std::uint32_t mask, std::size_t n) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v) {
    if (mask >> v & 1U) out.push_back(v);
  }
  return out;
}

}  // namespace testref

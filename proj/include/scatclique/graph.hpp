#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scatclique/matrix.hpp"

namespace scatclique {

using NodeId = std::uint32_t;
using NodeSet = std::vector<NodeId>;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable simple undirected graph in compressed sparse row form.
// Neighbor lists are sorted ascending with no duplicates and no self-loops.
class Graph {
 public:
  Graph() = default;

  // Builds from (u, v) pairs. Duplicates and reversed pairs collapse to one
  // edge. Self-loops and out-of-range indices throw GraphError.
  static Graph from_edge_list(std::span<const std::pair<NodeId, NodeId>> pairs, std::size_t n);

  std::size_t node_count() const { return degree_.size(); }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  std::size_t degree(NodeId v) const { return degree_[v]; }
  const std::vector<std::size_t>& degrees() const { return degree_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], degree_[v]};
  }

  // Binary search in the sorted neighbor list.
  bool has_edge(NodeId u, NodeId v) const;

  // Each undirected edge once, with u < v.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_;
  }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<std::size_t> degree_;
};

// Lazy random walk P = 1/2 (I + W D^-1), applied t times. Isolated nodes keep
// their mass (P e_v = e_v).
Matrix apply_walk(const Graph& g, const Matrix& x, int t);

// P^T = 1/2 (I + D^-1 W), applied t times.
Matrix apply_walk_transpose(const Graph& g, const Matrix& x, int t);

// Psi_0 = I - P, Psi_k = P^(2^(k-1)) - P^(2^k).
Matrix apply_wavelet(const Graph& g, const Matrix& x, int k);
Matrix apply_wavelet_transpose(const Graph& g, const Matrix& x, int k);

// A = (D+I)^-1/2 (W+I) (D+I)^-1/2, applied r times. A is symmetric.
Matrix apply_renorm_adj(const Graph& g, const Matrix& x, int r);

// p^T W p, summing both orientations of every edge.
double quad_form(const Graph& g, std::span<const double> p);

// W p.
std::vector<double> adjacency_times(const Graph& g, std::span<const double> p);

// p^T Wbar p = (sum p)^2 - p^T W p - sum p^2 for the complement adjacency.
double complement_quad_form(const Graph& g, std::span<const double> p);

bool is_clique(const Graph& g, std::span<const NodeId> nodes);

// Edge-list text: "u v" per line, '#' comments, optional "n <count>" header.
Graph read_edge_list(std::istream& in, const std::string& source_name = "<stream>");
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace scatclique

#include "scatclique/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace scatclique {

Graph Graph::from_edge_list(std::span<const std::pair<NodeId, NodeId>> pairs, std::size_t n) {
  std::vector<std::vector<NodeId>> adj(n);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [u, v] = pairs[i];
    if (u >= n || v >= n) {
      throw GraphError("edge " + std::to_string(i) + " (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") has an index >= node count " + std::to_string(n));
    }
    if (u == v) {
      throw GraphError("edge " + std::to_string(i) + " is a self-loop on node " +
                       std::to_string(u));
    }
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  Graph g;
  g.degree_.resize(n);
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.degree_[v] = list.size();
    g.offsets_[v + 1] = g.offsets_[v] + list.size();
  }
  g.neighbors_.reserve(g.offsets_[n]);
  for (const auto& list : adj) g.neighbors_.insert(g.neighbors_.end(), list.begin(), list.end());
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= node_count() || v >= node_count()) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

namespace {

void require_rows(const Graph& g, const Matrix& x, const char* op) {
  if (x.rows() != g.node_count()) {
    throw std::invalid_argument(std::string(op) + ": input has " + std::to_string(x.rows()) +
                                " rows, graph has " + std::to_string(g.node_count()) + " nodes");
  }
}

void require_power(int t, const char* op) {
  if (t < 0) throw std::invalid_argument(std::string(op) + ": negative power " + std::to_string(t));
}

// One pass of P = 1/2 (I + W D^-1).
Matrix walk_once(const Graph& g, const Matrix& x) {
  const std::size_t c = x.cols();
  Matrix out(x.rows(), c);
  std::vector<double> scaled(c);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto dst = out.row(u);
    auto src = x.row(u);
    if (g.degree(u) == 0) {
      std::copy(src.begin(), src.end(), dst.begin());
      continue;
    }
    for (std::size_t j = 0; j < c; ++j) dst[j] = 0.5 * src[j];
    for (NodeId v : g.neighbors(u)) {
      const double w = 0.5 / static_cast<double>(g.degree(v));
      auto xv = x.row(v);
      for (std::size_t j = 0; j < c; ++j) dst[j] += w * xv[j];
    }
  }
  return out;
}

// One pass of P^T = 1/2 (I + D^-1 W).
Matrix walk_transpose_once(const Graph& g, const Matrix& x) {
  const std::size_t c = x.cols();
  Matrix out(x.rows(), c);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto dst = out.row(u);
    auto src = x.row(u);
    if (g.degree(u) == 0) {
      std::copy(src.begin(), src.end(), dst.begin());
      continue;
    }
    for (NodeId v : g.neighbors(u)) {
      auto xv = x.row(v);
      for (std::size_t j = 0; j < c; ++j) dst[j] += xv[j];
    }
    const double w = 0.5 / static_cast<double>(g.degree(u));
    for (std::size_t j = 0; j < c; ++j) dst[j] = 0.5 * src[j] + w * dst[j];
  }
  return out;
}

Matrix renorm_adj_once(const Graph& g, const Matrix& x, std::span<const double> inv_sqrt) {
  const std::size_t c = x.cols();
  Matrix out(x.rows(), c);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto dst = out.row(u);
    auto src = x.row(u);
    for (std::size_t j = 0; j < c; ++j) dst[j] = inv_sqrt[u] * src[j];
    for (NodeId v : g.neighbors(u)) {
      auto xv = x.row(v);
      for (std::size_t j = 0; j < c; ++j) dst[j] += inv_sqrt[v] * xv[j];
    }
    for (std::size_t j = 0; j < c; ++j) dst[j] *= inv_sqrt[u];
  }
  return out;
}

template <typename Pass>
Matrix wavelet_with(const Graph& g, const Matrix& x, int k, Pass pass) {
  if (k == 0) return x - pass(g, x);
  // P^(2^(k-1)) x, then continue from it to P^(2^k) x.
  const int half = 1 << (k - 1);
  Matrix lo = x;
  for (int i = 0; i < half; ++i) lo = pass(g, lo);
  Matrix hi = lo;
  for (int i = 0; i < half; ++i) hi = pass(g, hi);
  return lo - hi;
}

}  // namespace

Matrix apply_walk(const Graph& g, const Matrix& x, int t) {
  require_rows(g, x, "apply_walk");
  require_power(t, "apply_walk");
  Matrix out = x;
  for (int i = 0; i < t; ++i) out = walk_once(g, out);
  return out;
}

Matrix apply_walk_transpose(const Graph& g, const Matrix& x, int t) {
  require_rows(g, x, "apply_walk_transpose");
  require_power(t, "apply_walk_transpose");
  Matrix out = x;
  for (int i = 0; i < t; ++i) out = walk_transpose_once(g, out);
  return out;
}

Matrix apply_wavelet(const Graph& g, const Matrix& x, int k) {
  require_rows(g, x, "apply_wavelet");
  require_power(k, "apply_wavelet");
  return wavelet_with(g, x, k, walk_once);
}

Matrix apply_wavelet_transpose(const Graph& g, const Matrix& x, int k) {
  require_rows(g, x, "apply_wavelet_transpose");
  require_power(k, "apply_wavelet_transpose");
  return wavelet_with(g, x, k, walk_transpose_once);
}

Matrix apply_renorm_adj(const Graph& g, const Matrix& x, int r) {
  require_rows(g, x, "apply_renorm_adj");
  require_power(r, "apply_renorm_adj");
  std::vector<double> inv_sqrt(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)) + 1.0);
  }
  Matrix out = x;
  for (int i = 0; i < r; ++i) out = renorm_adj_once(g, out, inv_sqrt);
  return out;
}

std::vector<double> adjacency_times(const Graph& g, std::span<const double> p) {
  if (p.size() != g.node_count()) throw std::invalid_argument("adjacency_times: size mismatch");
  std::vector<double> out(p.size(), 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    double acc = 0.0;
    for (NodeId v : g.neighbors(u)) acc += p[v];
    out[u] = acc;
  }
  return out;
}

double quad_form(const Graph& g, std::span<const double> p) {
  if (p.size() != g.node_count()) throw std::invalid_argument("quad_form: size mismatch");
  double acc = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    double row = 0.0;
    for (NodeId v : g.neighbors(u)) row += p[v];
    acc += p[u] * row;
  }
  return acc;
}

double complement_quad_form(const Graph& g, std::span<const double> p) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : p) {
    sum += v;
    sum_sq += v * v;
  }
  return sum * sum - quad_form(g, p) - sum_sq;
}

bool is_clique(const Graph& g, std::span<const NodeId> nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.node_count()) return false;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (!g.has_edge(nodes[i], nodes[j])) return false;
    }
  }
  return true;
}

Graph read_edge_list(std::istream& in, const std::string& source_name) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<std::size_t> pair_lines;
  std::size_t declared_n = 0;
  bool has_header = false;
  std::size_t max_index_plus_one = 0;

  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw GraphError(source_name + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a;
    fields >> a;
    if (a == "n") {
      long long count = -1;
      if (!(fields >> count) || count < 0) fail("malformed header, expected 'n <count>'");
      std::string extra;
      if (fields >> extra) fail("trailing token '" + extra + "' after header");
      if (has_header) fail("duplicate 'n' header");
      has_header = true;
      declared_n = static_cast<std::size_t>(count);
      continue;
    }
    long long u = -1;
    long long v = -1;
    std::istringstream pair_fields(line);
    if (!(pair_fields >> u >> v)) fail("expected two integer node indices");
    std::string extra;
    if (pair_fields >> extra) fail("trailing token '" + extra + "'");
    if (u < 0 || v < 0) fail("negative node index");
    if (u == v) fail("self-loop on node " + std::to_string(u));
    if (u > static_cast<long long>(UINT32_MAX) - 1 || v > static_cast<long long>(UINT32_MAX) - 1) {
      fail("node index out of range");
    }
    pairs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    pair_lines.push_back(line_no);
    max_index_plus_one =
        std::max(max_index_plus_one, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  std::size_t n = max_index_plus_one;
  if (has_header) {
    if (max_index_plus_one > declared_n) {
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].first >= declared_n || pairs[i].second >= declared_n) {
          line_no = pair_lines[i];
          fail("node index exceeds declared count " + std::to_string(declared_n));
        }
      }
    }
    n = declared_n;
  }
  return Graph::from_edge_list(pairs, n);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list '" + path + "'");
  return read_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.node_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace scatclique

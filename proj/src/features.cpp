#include "scatclique/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace scatclique {

std::vector<double> eccentricity(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> ecc(n, 0.0);
  std::vector<std::int64_t> dist(n, -1);
  std::vector<NodeId> queue(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::size_t head = 0;
    std::size_t tail = 0;
    queue[tail++] = s;
    dist[s] = 0;
    std::int64_t far = 0;
    while (head < tail) {
      const NodeId u = queue[head++];
      far = std::max(far, dist[u]);
      for (NodeId v : g.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    ecc[s] = static_cast<double>(far);
  }
  return ecc;
}

std::vector<double> clustering_coefficient(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> cc(n, 0.0);
  std::vector<char> mark(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t d = g.degree(v);
    if (d < 2) continue;
    auto nb = g.neighbors(v);
    for (NodeId u : nb) mark[u] = 1;
    std::size_t links = 0;
    for (NodeId u : nb) {
      for (NodeId w : g.neighbors(u)) {
        if (w > u && mark[w]) ++links;
      }
    }
    for (NodeId u : nb) mark[u] = 0;
    cc[v] = static_cast<double>(links) / (0.5 * static_cast<double>(d) * static_cast<double>(d - 1));
  }
  return cc;
}

std::vector<double> log_degree(const Graph& g) {
  std::vector<double> out(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out[v] = std::log(static_cast<double>(std::max<std::size_t>(g.degree(v), 1)));
  }
  return out;
}

FeatureMatrix compute_features(const Graph& g) {
  const auto ecc = eccentricity(g);
  const auto cc = clustering_coefficient(g);
  const auto logdeg = log_degree(g);
  Matrix x(g.node_count(), kFeatureDim);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    x(v, 0) = ecc[v];
    x(v, 1) = cc[v];
    x(v, 2) = logdeg[v];
  }
  return {std::move(x)};
}

FeatureMatrix standardize(FeatureMatrix f) {
  Matrix& x = f.values;
  const std::size_t n = x.rows();
  if (n == 0) return f;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r) x(r, c) = sd > 0.0 ? (x(r, c) - mean) / sd : 0.0;
  }
  return f;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& f) {
  out << "ecc,cc,logdeg\n";
  const auto precision = out.precision(17);
  for (std::size_t r = 0; r < f.values.rows(); ++r) {
    out << f.values(r, 0) << ',' << f.values(r, 1) << ',' << f.values(r, 2) << '\n';
  }
  out.precision(precision);
}

}  // namespace scatclique

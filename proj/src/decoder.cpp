#include "scatclique/decoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "scatclique/parallel.hpp"

namespace scatclique {

std::vector<NodeId> rank_nodes(std::span<const double> p) {
  std::vector<NodeId> order(p.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return p[a] > p[b]; });
  return order;
}

bool candidate_accept(const Graph& g, std::span<const NodeId> clique, NodeId v) {
  for (NodeId u : clique) {
    if (u == v || !g.has_edge(u, v)) return false;
  }
  return true;
}

CliqueResult decode(const Graph& g, std::span<const double> p, const DecoderConfig& cfg,
                    std::size_t threads) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = g.node_count();
  if (p.size() != n) {
    throw std::invalid_argument("decode: probability vector has " + std::to_string(p.size()) +
                                " entries for " + std::to_string(n) + " nodes");
  }
  if (n == 0) throw std::invalid_argument("decode: empty graph");
  if (cfg.kappa < 1) throw std::invalid_argument("decode: kappa must be >= 1");
  CliqueResult best;
  std::size_t tau = cfg.tau == 0 ? n : cfg.tau;
  if (tau > n) {
    tau = n;
    best.tau_clamped = true;
  }
  if (cfg.kappa > tau) {
    throw std::invalid_argument("decode: kappa (" + std::to_string(cfg.kappa) +
                                ") exceeds tau (" + std::to_string(tau) + ")");
  }

  const auto order = rank_nodes(p);
  std::vector<NodeSet> cliques(cfg.kappa);
  parallel_for(cfg.kappa, threads, [&](std::size_t j) {
    NodeSet clique{order[j]};
    for (std::size_t i = j + 1; i < tau; ++i) {
      if (candidate_accept(g, clique, order[i])) clique.push_back(order[i]);
    }
    cliques[j] = std::move(clique);
  });

  std::size_t winner = 0;
  for (std::size_t j = 1; j < cliques.size(); ++j) {
    if (cliques[j].size() > cliques[winner].size()) winner = j;
  }
  best.nodes = std::move(cliques[winner]);
  best.size = best.nodes.size();
  best.sampler_index = winner;
  best.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

std::size_t default_tau(std::size_t n, std::size_t expected_size) {
  if (expected_size == 0) return n;
  return std::min(n, 4 * expected_size);
}

}  // namespace scatclique

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scatclique/graph.hpp"

namespace scatclique {

struct DecoderConfig {
  std::size_t kappa = 1;  // samplers
  std::size_t tau = 0;    // prefix length; 0 means the whole ranking
};

struct CliqueResult {
  NodeSet nodes;            // in acceptance order, seed first
  std::size_t size = 0;
  std::size_t sampler_index = 0;  // 0-based rank of the winning seed
  double elapsed_seconds = 0.0;
  bool tau_clamped = false;  // requested tau exceeded n
};

// Node ids by descending p; equal values keep ascending id order.
std::vector<NodeId> rank_nodes(std::span<const double> p);

// v is adjacent to every member of `clique` (and not already in it).
bool candidate_accept(const Graph& g, std::span<const NodeId> clique, NodeId v);

// Greedy multi-sampler decoding: sampler j seeds with the rank-j node and
// scans ranks j+1 .. tau-1, keeping candidates that extend the clique. The
// largest clique wins, lowest sampler index on ties.
CliqueResult decode(const Graph& g, std::span<const double> p, const DecoderConfig& cfg,
                    std::size_t threads = 1);

// min(n, 4 * expected_size), or n when no size hint is available.
std::size_t default_tau(std::size_t n, std::size_t expected_size);

}  // namespace scatclique

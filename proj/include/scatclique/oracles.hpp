#pragma once

#include <cstddef>
#include <cstdint>

#include "scatclique/graph.hpp"

namespace scatclique {

inline constexpr std::size_t kDefaultExactNodeCap = 200;

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bron-Kerbosch with pivoting plus a greedy-coloring bound. Graphs above
// `node_cap` nodes are rejected unless `allow_over_cap` is set.
NodeSet exact_max_clique(const Graph& g, std::size_t node_cap = kDefaultExactNodeCap,
                         bool allow_over_cap = false);

struct HeuristicConfig {
  std::size_t eta1 = 5;    // restarts
  std::size_t eta2 = 100;  // iterations per restart
  std::uint64_t seed = 0;

  void validate() const;
};

// Random-restart local search: greedy growth from a random seed node, then
// add / (1,2)-swap / plateau-swap moves. A simplified baseline.
NodeSet local_search(const Graph& g, const HeuristicConfig& cfg);

// predicted / reference; may exceed 1 against a non-exact reference.
double approximation_score(std::size_t predicted_size, std::size_t reference_size);

}  // namespace scatclique

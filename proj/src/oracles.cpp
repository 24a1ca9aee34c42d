#include "scatclique/oracles.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <string>
#include <vector>

namespace scatclique {

namespace {

class Bitset {
 public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::size_t and_count(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    }
    return c;
  }
  Bitset operator&(const Bitset& o) const {
    Bitset r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }
  void and_not(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  }
  // Lowest set index, or npos.
  std::size_t first() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) return (i << 6) + static_cast<std::size_t>(std::countr_zero(words_[i]));
    }
    return npos;
  }
  template <typename F>
  void for_each(F&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        fn((i << 6) + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::uint64_t> words_;
};

// Number of colors in a greedy sequential coloring of `p`: an upper bound on
// the clique number of the induced subgraph.
std::size_t coloring_bound(const Bitset& p, const std::vector<Bitset>& adj) {
  Bitset uncolored = p;
  std::size_t colors = 0;
  while (uncolored.any()) {
    ++colors;
    Bitset available = uncolored;
    for (std::size_t v = available.first(); v != Bitset::npos; v = available.first()) {
      uncolored.reset(v);
      available.reset(v);
      available.and_not(adj[v]);
    }
  }
  return colors;
}

struct Frame {
  Bitset candidates;
  Bitset excluded;
  std::vector<std::size_t> branch;
  std::size_t next = 0;
};

Frame make_frame(Bitset candidates, Bitset excluded, const std::vector<Bitset>& adj) {
  // Pivot on the node of P u X covering the most of P.
  std::size_t pivot = Bitset::npos;
  std::size_t cover = 0;
  auto consider = [&](std::size_t u) {
    const std::size_t c = candidates.and_count(adj[u]);
    if (pivot == Bitset::npos || c > cover) {
      pivot = u;
      cover = c;
    }
  };
  candidates.for_each(consider);
  excluded.for_each(consider);
  Frame f{std::move(candidates), std::move(excluded), {}, 0};
  f.candidates.for_each([&](std::size_t v) {
    if (pivot == Bitset::npos || !adj[pivot].test(v)) f.branch.push_back(v);
  });
  return f;
}

}  // namespace

NodeSet exact_max_clique(const Graph& g, std::size_t node_cap, bool allow_over_cap) {
  const std::size_t n = g.node_count();
  if (n > node_cap && !allow_over_cap) {
    throw OracleError("exact_max_clique: graph has " + std::to_string(n) +
                      " nodes, above the cap of " + std::to_string(node_cap) +
                      "; raise the cap or allow over-cap solving explicitly");
  }
  if (n == 0) return {};

  std::vector<Bitset> adj(n, Bitset(n));
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) adj[u].set(v);
  }

  Bitset all(n);
  for (std::size_t v = 0; v < n; ++v) all.set(v);

  std::vector<std::size_t> current;
  std::vector<std::size_t> best;
  std::vector<Frame> stack;
  stack.push_back(make_frame(all, Bitset(n), adj));

  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.branch.size()) {
      stack.pop_back();
      if (!current.empty()) current.pop_back();
      continue;
    }
    const std::size_t v = top.branch[top.next++];
    Bitset child_p = top.candidates & adj[v];
    Bitset child_x = top.excluded & adj[v];
    top.candidates.reset(v);
    top.excluded.set(v);

    current.push_back(v);
    if (!child_p.any()) {
      if (current.size() > best.size()) best = current;
      current.pop_back();
      continue;
    }
    if (current.size() + coloring_bound(child_p, adj) <= best.size()) {
      current.pop_back();
      continue;
    }
    stack.push_back(make_frame(std::move(child_p), std::move(child_x), adj));
  }

  NodeSet out(best.begin(), best.end());
  std::sort(out.begin(), out.end());
  return out;
}

void HeuristicConfig::validate() const {
  if (eta1 < 1 || eta2 < 1) throw std::invalid_argument("local search needs eta1, eta2 >= 1");
}

namespace {

// Clique under modification with, for every node, the number of members it
// is not adjacent to (members count themselves as non-adjacent).
class WorkingClique {
 public:
  explicit WorkingClique(const Graph& g)
      : g_(g), in_(g.node_count(), 0), missing_(g.node_count(), 0), mark_(g.node_count(), 0) {}

  void add(NodeId v) {
    members_.push_back(v);
    in_[v] = 1;
    adjust(v, +1);
  }
  void remove(NodeId v) {
    members_.erase(std::find(members_.begin(), members_.end(), v));
    in_[v] = 0;
    adjust(v, -1);
  }
  bool contains(NodeId v) const { return in_[v] != 0; }
  std::size_t missing(NodeId v) const { return missing_[v]; }
  const NodeSet& members() const { return members_; }

  // The unique member w is not adjacent to, given missing(w) == 1.
  NodeId blocker(NodeId w) const {
    for (NodeId u : members_) {
      if (!g_.has_edge(u, w)) return u;
    }
    return w;
  }

 private:
  void adjust(NodeId v, int delta) {
    for (NodeId u : g_.neighbors(v)) mark_[u] = 1;
    for (NodeId w = 0; w < g_.node_count(); ++w) {
      if (!mark_[w]) missing_[w] = static_cast<std::size_t>(static_cast<long>(missing_[w]) + delta);
    }
    for (NodeId u : g_.neighbors(v)) mark_[u] = 0;
  }

  const Graph& g_;
  NodeSet members_;
  std::vector<char> in_;
  std::vector<std::size_t> missing_;
  std::vector<char> mark_;
};

}  // namespace

NodeSet local_search(const Graph& g, const HeuristicConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.node_count();
  if (n == 0) return {};
  std::mt19937_64 rng(cfg.seed);
  NodeSet best;

  for (std::size_t restart = 0; restart < cfg.eta1; ++restart) {
    WorkingClique clique(g);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    clique.add(pick(rng));
    NodeId tabu = static_cast<NodeId>(n);

    // Add the admissible node with the most admissible neighbors.
    auto try_add = [&]() {
      std::vector<NodeId> admissible;
      for (NodeId w = 0; w < n; ++w) {
        if (!clique.contains(w) && clique.missing(w) == 0 && w != tabu) admissible.push_back(w);
      }
      if (admissible.empty()) return false;
      std::vector<char> is_adm(n, 0);
      for (NodeId w : admissible) is_adm[w] = 1;
      std::size_t best_links = 0;
      std::vector<NodeId> top;
      for (NodeId w : admissible) {
        std::size_t links = 0;
        for (NodeId u : g.neighbors(w)) links += is_adm[u];
        if (top.empty() || links > best_links) {
          best_links = links;
          top.assign(1, w);
        } else if (links == best_links) {
          top.push_back(w);
        }
      }
      std::uniform_int_distribution<std::size_t> choose(0, top.size() - 1);
      clique.add(top[choose(rng)]);
      return true;
    };

    while (try_add()) {
    }
    if (clique.members().size() > best.size()) best = clique.members();

    for (std::size_t iter = 0; iter < cfg.eta2; ++iter) {
      if (try_add()) {
        if (clique.members().size() > best.size()) best = clique.members();
        continue;
      }
      // Nodes blocked by exactly one member, grouped by that member.
      std::vector<NodeId> one_missing;
      for (NodeId w = 0; w < n; ++w) {
        if (!clique.contains(w) && clique.missing(w) == 1) one_missing.push_back(w);
      }
      if (one_missing.empty()) break;

      bool improved = false;
      std::vector<NodeId> blockers(one_missing.size());
      for (std::size_t i = 0; i < one_missing.size(); ++i) {
        blockers[i] = clique.blocker(one_missing[i]);
      }
      for (std::size_t i = 0; i < one_missing.size() && !improved; ++i) {
        for (std::size_t j = i + 1; j < one_missing.size(); ++j) {
          if (blockers[i] == blockers[j] && g.has_edge(one_missing[i], one_missing[j])) {
            clique.remove(blockers[i]);
            clique.add(one_missing[i]);
            clique.add(one_missing[j]);
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        std::vector<std::size_t> allowed;
        for (std::size_t i = 0; i < one_missing.size(); ++i) {
          if (one_missing[i] != tabu) allowed.push_back(i);
        }
        if (allowed.empty()) break;
        std::uniform_int_distribution<std::size_t> choose(0, allowed.size() - 1);
        const std::size_t i = allowed[choose(rng)];
        clique.remove(blockers[i]);
        clique.add(one_missing[i]);
        tabu = blockers[i];
      }
      if (clique.members().size() > best.size()) best = clique.members();
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

double approximation_score(std::size_t predicted_size, std::size_t reference_size) {
  if (reference_size == 0) throw std::invalid_argument("approximation_score: reference size is 0");
  return static_cast<double>(predicted_size) / static_cast<double>(reference_size);
}

}  // namespace scatclique

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dense_reference.hpp"
#include "scatclique/decoder.hpp"

using namespace scatclique;

namespace {

std::vector<double> random_p(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (double& v : p) v = u(rng);
  return p;
}

// Triangle a=0, b=1, c=2 plus pendant d=3 attached to a.
Graph triangle_with_pendant() {
  const std::pair<NodeId, NodeId> e[] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}};
  return Graph::from_edge_list(e, 4);
}

}  // namespace

TEST_CASE("rank_nodes") {
  CHECK(rank_nodes(std::vector<double>{0.1, 0.9, 0.5}) == std::vector<NodeId>{1, 2, 0});
  CHECK(rank_nodes(std::vector<double>(5, 0.3)) == std::vector<NodeId>{0, 1, 2, 3, 4});
  CHECK(rank_nodes(std::vector<double>{0.2, 0.7, 0.2, 0.7}) == std::vector<NodeId>{1, 3, 0, 2});

  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    auto p = random_p(30, rng);
    std::vector<NodeId> ref(30);
    std::iota(ref.begin(), ref.end(), NodeId{0});
    std::sort(ref.begin(), ref.end(), [&](NodeId a, NodeId b) { return p[a] > p[b]; });
    CHECK(rank_nodes(p) == ref);
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = std::exp(3.0 * p[i]) - 7.0;
    CHECK(rank_nodes(q) == ref);
  }
}

TEST_CASE("decode examples") {
  Graph k4 = testref::complete_graph(4);
  auto r = decode(k4, std::vector<double>{0.3, 0.1, 0.9, 0.4}, {1, 4});
  CHECK(r.size == 4);

  auto hot = decode(testref::complete_graph(5), std::vector<double>{0, 0, 1, 0, 0}, {1, 1});
  CHECK(hot.nodes == NodeSet{2});

  Graph g = triangle_with_pendant();
  std::vector<double> p{0.90, 0.80, 0.70, 0.95};
  auto one = decode(g, p, {1, 4});
  CHECK(one.size == 2);
  NodeSet s1 = one.nodes;
  std::sort(s1.begin(), s1.end());
  CHECK(s1 == NodeSet{0, 3});
  auto two = decode(g, p, {2, 4});
  CHECK(two.size == 3);
  NodeSet s2 = two.nodes;
  std::sort(s2.begin(), s2.end());
  CHECK(s2 == NodeSet{0, 1, 2});
  CHECK(two.sampler_index == 1);
  CHECK(two.nodes.front() == 0);
}

TEST_CASE("decode configuration errors") {
  Graph k4 = testref::complete_graph(4);
  std::vector<double> p(4, 0.5);
  CHECK_THROWS(decode(k4, p, {5, 4}));
  CHECK_THROWS(decode(k4, p, {0, 4}));
  CHECK_THROWS(decode(k4, std::vector<double>(3, 0.5), {1, 3}));
  CHECK_THROWS(decode(Graph::from_edge_list({}, 0), std::vector<double>{}, {1, 0}));
  auto clamped = decode(k4, p, {1, 9});
  CHECK(clamped.tau_clamped);
  CHECK(clamped.size == 4);
  CHECK_FALSE(decode(k4, p, {1, 0}).tau_clamped);
}

TEST_CASE("candidate_accept") {
  const std::pair<NodeId, NodeId> e[] = {{0, 1}, {1, 2}, {0, 2}};
  Graph g = Graph::from_edge_list(e, 4);
  CHECK_FALSE(candidate_accept(g, std::vector<NodeId>{0}, 3));
  CHECK(candidate_accept(g, std::vector<NodeId>{0, 1}, 2));
  CHECK(candidate_accept(g, std::vector<NodeId>{}, 3));

  std::mt19937_64 rng(2);
  int trials = 0;
  while (trials < 1000) {
    Graph r = testref::random_graph(2 + rng() % 9, 0.6, rng);
    const std::size_t n = r.node_count();
    const std::uint32_t mask = static_cast<std::uint32_t>(rng() % (1U << n));
    if (!testref::mask_is_clique(r, mask)) continue;
    const NodeId v = static_cast<NodeId>(rng() % n);
    if (mask >> v & 1U) continue;
    ++trials;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i & 1U) || i == v ? 1.0 : 0.0;
    CHECK(candidate_accept(r, testref::mask_nodes(mask, n), v) == (complement_quad_form(r, x) == 0.0));
  }
}

TEST_CASE("decode soundness, kappa monotonicity, determinism, threads") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    Graph g = testref::random_graph(2 + rng() % 30, 0.4, rng);
    const std::size_t n = g.node_count();
    auto p = random_p(n, rng);
    const std::size_t tau = 1 + rng() % n;
    const std::size_t k1 = 1 + rng() % tau;
    const std::size_t k2 = k1 + rng() % (tau - k1 + 1);
    auto a = decode(g, p, {k1, tau});
    auto b = decode(g, p, {k2, tau}, 3);
    CHECK(is_clique(g, a.nodes));
    CHECK(is_clique(g, b.nodes));
    CHECK(a.size == a.nodes.size());
    CHECK(a.size >= 1);
    CHECK(b.size >= a.size);
    auto again = decode(g, p, {k2, tau}, 1);
    CHECK(again.nodes == b.nodes);
    CHECK(again.sampler_index == b.sampler_index);
    const auto rank = rank_nodes(p);
    CHECK(a.nodes.front() == rank[a.sampler_index]);
  }
}

TEST_CASE("indicator of the maximum clique decodes to it") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    Graph g = testref::random_graph(3 + rng() % 10, 0.5, rng);
    const std::size_t n = g.node_count();
    std::uint32_t best = 0;
    for (std::uint32_t m = 0; m < (1U << n); ++m) {
      if (__builtin_popcount(m) > __builtin_popcount(best) && testref::mask_is_clique(g, m)) best = m;
    }
    std::vector<double> p(n);
    for (std::size_t v = 0; v < n; ++v) p[v] = (best >> v & 1U) ? 1.0 : 0.0;
    auto r = decode(g, p, {1, n});
    CHECK(r.size == static_cast<std::size_t>(__builtin_popcount(best)));
  }
}

TEST_CASE("default tau") {
  CHECK(default_tau(50, 8) == 32);
  CHECK(default_tau(20, 8) == 20);
  CHECK(default_tau(20, 0) == 20);
}

#include <doctest.h>

#include "dense_reference.hpp"
#include "scatclique/loss.hpp"

using namespace scatclique;
namespace ad = scatclique::ad;

namespace {

std::vector<double> random_p(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (double& v : p) v = u(rng);
  return p;
}

// Both sums of the cross-check form written out over ordered pairs.
double dense_karalias(const Graph& g, const std::vector<double>& p, double bp, double gamma) {
  const Matrix w = testref::adjacency(g);
  double edge_sum = 0.0;
  double all_pairs = 0.0;
  for (std::size_t u = 0; u < p.size(); ++u) {
    for (std::size_t v = 0; v < p.size(); ++v) {
      if (u == v) continue;
      edge_sum += w(u, v) * p[u] * p[v];
      all_pairs += p[u] * p[v];
    }
  }
  return gamma - (bp + 1.0) * edge_sum + 0.5 * bp * all_pairs;
}

}  // namespace

TEST_CASE("loss values") {
  Graph k3 = testref::complete_graph(3);
  for (double beta : {0.0, 0.25, 1.0, 3.0}) {
    CHECK(loss(std::vector<double>{1, 1, 1}, k3, LossConfig{beta}) == -6.0);
    CHECK(loss(std::vector<double>{1, 1}, testref::complete_graph(2), LossConfig{beta}) == -2.0);
    CHECK(loss(std::vector<double>(3, 0.0), k3, LossConfig{beta}) == 0.0);
  }
  CHECK_THROWS(LossConfig{-0.1}.validate());
}

TEST_CASE("loss is the two quadratic forms and matches the dense oracle") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    Graph g = testref::random_graph(1 + rng() % 10, 0.4, rng);
    auto p = random_p(g.node_count(), rng);
    const double beta = 0.1 * static_cast<double>(rng() % 20);
    const double expected = -quad_form(g, p) + beta * complement_quad_form(g, p);
    CHECK(loss(p, g, LossConfig{beta}) == expected);
    const double dense = -testref::quad(testref::adjacency(g), p) + beta * testref::quad(testref::complement(g), p);
    CHECK(std::abs(loss(p, g, LossConfig{beta}) - dense) < 1e-9);

    ad::Tape t;
    ad::Var pv = t.leaf(Matrix::column(p), true);
    ad::Var l = loss(pv, g, LossConfig{beta});
    CHECK(l.value()(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("support certificate") {
  const std::pair<NodeId, NodeId> e[] = {{0, 1}, {1, 2}, {0, 2}, {2, 3}};
  Graph g = Graph::from_edge_list(e, 4);
  CHECK(loss_support_certificate(std::vector<double>{1, 1, 1, 0}, g, 0.0));
  CHECK_FALSE(loss_support_certificate(std::vector<double>{0.2, 0, 0, 0.3}, g, 0.0));
  CHECK(loss_support_certificate(std::vector<double>{0.2, 0, 0, 0.3}, g, 0.25));
  CHECK(loss_support_certificate(std::vector<double>(4, 0.0), g, 0.0));
}

TEST_CASE("certificate agrees with brute force on every support") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    Graph g = testref::random_graph(1 + rng() % 8, 0.6, rng);
    const std::size_t n = g.node_count();
    std::uniform_real_distribution<double> mass(0.01, 1.0);
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      std::vector<double> p(n, 0.0);
      for (std::size_t v = 0; v < n; ++v) {
        if (mask >> v & 1U) p[v] = mass(rng);
      }
      CHECK(loss_support_certificate(p, g, 0.0) == testref::mask_is_clique(g, mask));
      std::vector<double> x(n);
      for (std::size_t v = 0; v < n; ++v) x[v] = (mask >> v & 1U) ? 1.0 : 0.0;
      CHECK((complement_quad_form(g, x) == 0.0) == testref::contained_in_some_clique(g, mask));
    }
  }
}

TEST_CASE("cross-check form against its dense evaluation") {
  std::mt19937_64 rng(8);
  CHECK(loss_karalias_form(std::vector<double>(4, 0.0), testref::complete_graph(4), 1.0, 2.5) == 2.5);
  for (int rep = 0; rep < 100; ++rep) {
    Graph g = testref::random_graph(1 + rng() % 10, 0.4, rng);
    auto p = random_p(g.node_count(), rng);
    CHECK(std::abs(loss_karalias_form(p, g, 1.0, 0.0) - dense_karalias(g, p, 1.0, 0.0)) < 1e-9);
    CHECK(std::abs(loss_karalias_form(p, g, 0.3, 1.0) - dense_karalias(g, p, 0.3, 1.0)) < 1e-9);
  }
}

TEST_CASE("halved cross-check form equals three quarters of the beta = 1/3 loss") {
  // With beta' = 1 and gamma = 0 the cross-check form is -1.5 Q + 0.5 C for
  // Q = p^T W p and C = p^T Wbar p. That is not a multiple of -Q + C/4.
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    Graph g = testref::random_graph(1 + rng() % 10, 0.4, rng);
    auto p = random_p(g.node_count(), rng);
    const double halved = 0.5 * loss_karalias_form(p, g, 1.0, 0.0);
    CHECK(std::abs(halved - 0.75 * loss(p, g, LossConfig{1.0 / 3.0})) < 1e-9);
  }
  Graph k3 = testref::complete_graph(3);
  std::vector<double> ones(3, 1.0);
  CHECK(0.5 * loss_karalias_form(ones, k3, 1.0, 0.0) == -4.5);
  CHECK(loss(ones, k3, LossConfig{kKaraliasBeta}) == -6.0);
}

TEST_CASE("raising mass inside a clique lowers the first term") {
  Graph k4 = testref::complete_graph(4);
  std::vector<double> p{0.5, 0.5, 0.5, 0.1};
  double before = -quad_form(k4, p);
  p[3] = 0.6;
  CHECK(-quad_form(k4, p) < before);
}

TEST_CASE("loss gradient closed form") {
  std::mt19937_64 rng(10);
  Graph g = testref::random_graph(9, 0.4, rng);
  auto p = random_p(9, rng);
  const double beta = 0.7;
  ad::Tape t;
  ad::Var pv = t.leaf(Matrix::column(p), true);
  t.backward(loss(pv, g, LossConfig{beta}));
  auto wp = adjacency_times(g, p);
  double s = 0.0;
  for (double v : p) s += v;
  for (std::size_t i = 0; i < 9; ++i) {
    const double expect = -2.0 * (1.0 + beta) * wp[i] + 2.0 * beta * s - 2.0 * beta * p[i];
    CHECK(pv.grad()(i, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dense_reference.hpp"
#include "scatclique/features.hpp"

using namespace scatclique;

namespace {

Graph path3() {
  const std::pair<NodeId, NodeId> e[] = {{0, 1}, {1, 2}};
  return Graph::from_edge_list(e, 3);
}

}  // namespace

TEST_CASE("eccentricity") {
  CHECK(eccentricity(path3()) == std::vector<double>{2, 1, 2});
  CHECK(eccentricity(testref::complete_graph(5)) == std::vector<double>(5, 1.0));
  CHECK(eccentricity(Graph::from_edge_list({}, 1)) == std::vector<double>{0});

  // Two components: a path of 3 and an isolated node.
  const std::pair<NodeId, NodeId> e[] = {{0, 1}, {1, 2}};
  CHECK(eccentricity(Graph::from_edge_list(e, 4)) == std::vector<double>{2, 1, 2, 0});
}

TEST_CASE("clustering coefficient") {
  CHECK(clustering_coefficient(testref::complete_graph(3)) == std::vector<double>{1, 1, 1});
  const std::pair<NodeId, NodeId> star[] = {{0, 1}, {0, 2}, {0, 3}};
  CHECK(clustering_coefficient(Graph::from_edge_list(star, 4))[0] == 0.0);
  CHECK(clustering_coefficient(path3())[1] == 0.0);
  // Diamond: node 0 has neighbors {1,2,3} with the single edge 1-2.
  const std::pair<NodeId, NodeId> d[] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}};
  CHECK(clustering_coefficient(Graph::from_edge_list(d, 4))[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("log degree") {
  const std::pair<NodeId, NodeId> star[] = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}};
  const auto ld = log_degree(Graph::from_edge_list(star, 9));
  CHECK(ld[1] == 0.0);
  CHECK(ld[8] == 0.0);
  CHECK(ld[0] == doctest::Approx(1.9459).epsilon(1e-4));
}

TEST_CASE("compute_features assembles columns in order") {
  FeatureMatrix t = compute_features(testref::complete_graph(3));
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(t.values(r, 0) == 1.0);
    CHECK(t.values(r, 1) == 1.0);
    CHECK(t.values(r, 2) == doctest::Approx(std::log(2.0)));
  }
  FeatureMatrix one = compute_features(Graph::from_edge_list({}, 1));
  CHECK(one.values == Matrix(1, 3));
  FeatureMatrix p = compute_features(path3());
  CHECK(p.values(1, 0) == 1.0);
  CHECK(p.values(1, 1) == 0.0);
  CHECK(p.values(1, 2) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("features are equivariant under relabeling") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    Graph g = testref::random_graph(2 + rng() % 15, 0.3, rng);
    const std::size_t n = g.node_count();
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
    Graph h = Graph::from_edge_list(edges, n);
    FeatureMatrix fg = compute_features(g);
    FeatureMatrix fh = compute_features(h);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t c = 0; c < kFeatureDim; ++c) CHECK(fg.values(v, c) == fh.values(perm[v], c));
    }
    for (std::size_t v = 0; v < n; ++v) {
      CHECK(fg.values(v, 1) >= 0.0);
      CHECK(fg.values(v, 1) <= 1.0);
      CHECK(fg.values(v, 0) == std::floor(fg.values(v, 0)));
    }
  }
}

TEST_CASE("standardize gives zero mean, unit variance, zero for constants") {
  std::mt19937_64 rng(1);
  Graph g = testref::random_graph(20, 0.3, rng);
  FeatureMatrix z = standardize(compute_features(g));
  for (std::size_t c = 0; c < kFeatureDim; ++c) {
    const auto col = z.values.col(c);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    CHECK(std::abs(mean) < 1e-12);
    const bool constant = var == 0.0;
    if (!constant) CHECK(var / col.size() == doctest::Approx(1.0));
  }
  FeatureMatrix k = standardize(compute_features(testref::complete_graph(4)));
  CHECK(k.values == Matrix(4, 3));
}

TEST_CASE("features CSV") {
  std::ostringstream out;
  write_features_csv(out, compute_features(path3()));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "ecc,cc,logdeg");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

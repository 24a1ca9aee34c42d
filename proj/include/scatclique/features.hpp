#pragma once

#include <iosfwd>
#include <vector>

#include "scatclique/graph.hpp"
#include "scatclique/matrix.hpp"

namespace scatclique {

inline constexpr std::size_t kFeatureDim = 3;

// n x 3 node statistics, columns (eccentricity, clustering coefficient, log-degree).
struct FeatureMatrix {
  Matrix values;
};

// Per-component eccentricity: unreachable nodes do not count.
std::vector<double> eccentricity(const Graph& g);

// Local clustering coefficient; 0 for degree < 2.
std::vector<double> clustering_coefficient(const Graph& g);

// ln(max(d_v, 1)).
std::vector<double> log_degree(const Graph& g);

FeatureMatrix compute_features(const Graph& g);

// Per-column z-score within one graph. Constant columns become 0.
FeatureMatrix standardize(FeatureMatrix f);

// CSV with header "ecc,cc,logdeg".
void write_features_csv(std::ostream& out, const FeatureMatrix& f);

}  // namespace scatclique

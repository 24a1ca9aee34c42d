#pragma once

#include <span>

#include "scatclique/autodiff.hpp"
#include "scatclique/graph.hpp"

namespace scatclique {

struct LossConfig {
  double beta = 1.0;

  void validate() const;
};

// Beta at which half the Karalias-Loukas objective is expected to equal
// `loss`. With the ordered-pair sums below it equals 0.75 * loss(beta = 1/3).
inline constexpr double kKaraliasBeta = 0.25;

// -p^T W p + beta * p^T Wbar p.
double loss(std::span<const double> p, const Graph& g, const LossConfig& cfg);

// Differentiable form of `loss` on a recorded n x 1 probability vector.
ad::Var loss(ad::Var p, const Graph& g, const LossConfig& cfg);

// True iff {v : p_v > threshold} is a clique, tested as p_S^T Wbar p_S = 0 on the
// thresholded support.
bool loss_support_certificate(std::span<const double> p, const Graph& g, double threshold);

// gamma - (beta' + 1) sum_{(u,v) in E} p_u p_v + beta'/2 sum_{u != v} p_u p_v,
// both sums over ordered pairs.
double loss_karalias_form(std::span<const double> p, const Graph& g, double beta_prime,
                          double gamma);

}  // namespace scatclique

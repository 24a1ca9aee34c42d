#include "scatclique/loss.hpp"

#include <stdexcept>
#include <vector>

namespace scatclique {

void LossConfig::validate() const {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
}

double loss(std::span<const double> p, const Graph& g, const LossConfig& cfg) {
  cfg.validate();
  return -quad_form(g, p) + cfg.beta * complement_quad_form(g, p);
}

ad::Var loss(ad::Var p, const Graph& g, const LossConfig& cfg) {
  cfg.validate();
  return ad::quad_form_loss(p, g, cfg.beta);
}

bool loss_support_certificate(std::span<const double> p, const Graph& g, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("certificate threshold must be >= 0");
  std::vector<double> indicator(p.size(), 0.0);
  for (std::size_t v = 0; v < p.size(); ++v) indicator[v] = p[v] > threshold ? 1.0 : 0.0;
  // Integer-valued, so the identity is exact in floating point.
  return complement_quad_form(g, indicator) == 0.0;
}

double loss_karalias_form(std::span<const double> p, const Graph& g, double beta_prime,
                          double gamma) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : p) {
    sum += v;
    sum_sq += v * v;
  }
  const double edge_term = quad_form(g, p);
  const double distinct_pairs = sum * sum - sum_sq;
  return gamma - (beta_prime + 1.0) * edge_term + 0.5 * beta_prime * distinct_pairs;
}

}  // namespace scatclique

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scatclique/autodiff.hpp"
#include "scatclique/features.hpp"
#include "scatclique/graph.hpp"
#include "scatclique/matrix.hpp"

namespace scatclique {

// Low-pass filters are powers of the renormalized adjacency A^r; band-pass
// filters are diffusion wavelets Psi_k.
struct FilterSpec {
  enum class Kind { LowPass, BandPass };
  Kind kind = Kind::LowPass;
  int order = 1;

  std::string name() const;
  static FilterSpec parse(const std::string& text);
  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

std::vector<FilterSpec> default_filter_set();

struct ModelConfig {
  std::size_t input_dim = kFeatureDim;
  std::size_t hidden_dim = 8;
  std::size_t layers = 2;
  // Linear maps per MLP; 1 collapses each MLP to a single affine map.
  std::size_t mlp_depth = 2;
  std::vector<FilterSpec> filters = default_filter_set();
  // Ablation: keep only the low-pass filters.
  bool low_pass_only = false;
  // Per-graph z-score of the input features before the embedding.
  bool standardize_features = false;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<FilterSpec> active_filters() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

template <typename T>
struct MlpParams {
  std::vector<T> weights;
  std::vector<T> biases;
};

template <typename T>
struct LayerParamsT {
  T attention;  // 2*hidden x 1
  MlpParams<T> mlp;
};

template <typename T>
struct ParamTree {
  MlpParams<T> embedding;
  std::vector<LayerParamsT<T>> layers;
  MlpParams<T> output;
};

using ModelParams = ParamTree<Matrix>;
using ParamVars = ParamTree<ad::Var>;

// Visits every tensor in a fixed order with a stable dotted name.
template <typename T, typename F>
void for_each_named(ParamTree<T>& tree, F&& fn);
template <typename T, typename F>
void for_each_named(const ParamTree<T>& tree, F&& fn);

ModelParams init_params(const ModelConfig& config);
std::size_t count_params(const ModelConfig& config);
std::size_t scalar_count(const ModelParams& params);

std::vector<Matrix> flatten(const ModelParams& params);
ModelParams unflatten(const ModelConfig& config, const std::vector<Matrix>& tensors);
// Overwrites every tensor in flatten() order; shapes must match.
void assign(ModelParams& params, const std::vector<Matrix>& tensors);

ParamVars bind(ad::Tape& tape, const ModelParams& params, bool requires_grad);

Matrix prepare_input(const FeatureMatrix& features, const ModelConfig& config);

ad::Var mlp_forward(const MlpParams<ad::Var>& mlp, ad::Var x);
ad::Var embed(ad::Var x, const ParamVars& params, const ModelConfig& config);

struct LayerOutput {
  ad::Var hidden;
  std::vector<ad::Var> attention;  // one n x 1 weight column per active filter
};

LayerOutput layer_forward(ad::Var previous, const Graph& g, const LayerParamsT<ad::Var>& layer,
                          const ModelConfig& config);

struct ForwardResult {
  ad::Var probabilities;  // n x 1
  ad::Var logits;         // n x 1, before min-max normalization
  std::vector<ad::Var> readouts;
  std::vector<std::vector<ad::Var>> attention;
};

ForwardResult forward(ad::Tape& tape, const Graph& g, const Matrix& input,
                      const ParamVars& params, const ModelConfig& config);

// Non-differentiable convenience path for inference.
struct Prediction {
  std::vector<double> probabilities;
  std::vector<Matrix> readouts;
  std::vector<std::vector<std::vector<double>>> attention;
};

Prediction predict(const Graph& g, const FeatureMatrix& features, const ModelParams& params,
                   const ModelConfig& config);

// ---------------------------------------------------------------------------

template <typename T, typename F>
void for_each_named_impl(T& tree, F&& fn) {
  auto visit_mlp = [&](auto& mlp, const std::string& prefix) {
    for (std::size_t i = 0; i < mlp.weights.size(); ++i) {
      fn(prefix + "." + std::to_string(i) + ".weight", mlp.weights[i]);
      fn(prefix + "." + std::to_string(i) + ".bias", mlp.biases[i]);
    }
  };
  visit_mlp(tree.embedding, "embedding");
  for (std::size_t l = 0; l < tree.layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l + 1);
    fn(prefix + ".attention", tree.layers[l].attention);
    visit_mlp(tree.layers[l].mlp, prefix + ".mlp");
  }
  visit_mlp(tree.output, "output");
}

template <typename T, typename F>
void for_each_named(ParamTree<T>& tree, F&& fn) {
  for_each_named_impl(tree, std::forward<F>(fn));
}

template <typename T, typename F>
void for_each_named(const ParamTree<T>& tree, F&& fn) {
  for_each_named_impl(tree, std::forward<F>(fn));
}

}  // namespace scatclique

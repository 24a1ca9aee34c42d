#include "scatclique/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace scatclique {

std::string FilterSpec::name() const {
  return (kind == Kind::LowPass ? "A" : "Psi") + std::to_string(order);
}

FilterSpec FilterSpec::parse(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  FilterSpec spec;
  std::string digits;
  if (lower.rfind("psi", 0) == 0) {
    spec.kind = Kind::BandPass;
    digits = lower.substr(3);
  } else if (lower.rfind("a", 0) == 0) {
    spec.kind = Kind::LowPass;
    digits = lower.substr(1);
  } else {
    throw std::invalid_argument("unknown filter '" + text + "' (expected A<r> or Psi<k>)");
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 2) {
    throw std::invalid_argument("bad filter order in '" + text + "'");
  }
  spec.order = std::stoi(digits);
  if (spec.kind == Kind::LowPass && spec.order < 1) {
    throw std::invalid_argument("low-pass filter order must be >= 1 in '" + text + "'");
  }
  if (spec.kind == Kind::BandPass && spec.order > 10) {
    throw std::invalid_argument("wavelet order too large in '" + text + "'");
  }
  return spec;
}

std::vector<FilterSpec> default_filter_set() {
  using K = FilterSpec::Kind;
  return {{K::LowPass, 1}, {K::LowPass, 2}, {K::LowPass, 3},
          {K::BandPass, 1}, {K::BandPass, 2}, {K::BandPass, 3}};
}

void ModelConfig::validate() const {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  if (layers < 1) throw std::invalid_argument("layer count must be >= 1");
  if (mlp_depth < 1) throw std::invalid_argument("mlp_depth must be >= 1");
  if (filters.empty()) throw std::invalid_argument("filter set is empty");
  if (active_filters().empty()) {
    throw std::invalid_argument("low_pass_only leaves no filters in the filter set");
  }
}

std::vector<FilterSpec> ModelConfig::active_filters() const {
  if (!low_pass_only) return filters;
  std::vector<FilterSpec> out;
  for (const auto& f : filters) {
    if (f.kind == FilterSpec::Kind::LowPass) out.push_back(f);
  }
  return out;
}

namespace {

std::size_t mlp_count(std::size_t in, std::size_t hidden, std::size_t out, std::size_t depth) {
  if (depth == 1) return in * out + out;
  return (in * hidden + hidden) + (depth - 2) * (hidden * hidden + hidden) + (hidden * out + out);
}

template <typename Rng>
MlpParams<Matrix> init_mlp(std::size_t in, std::size_t hidden, std::size_t out, std::size_t depth,
                           Rng& rng) {
  MlpParams<Matrix> mlp;
  for (std::size_t i = 0; i < depth; ++i) {
    const std::size_t fan_in = i == 0 ? in : hidden;
    const std::size_t fan_out = i + 1 == depth ? out : hidden;
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(fan_in, fan_out);
    for (double& v : w.data()) v = dist(rng);
    mlp.weights.push_back(std::move(w));
    mlp.biases.emplace_back(1, fan_out);
  }
  return mlp;
}

}  // namespace

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const std::size_t d = config.input_dim;
  const std::size_t h = config.hidden_dim;
  ModelParams params;
  params.embedding = init_mlp(d, h, h, config.mlp_depth, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerParamsT<Matrix> layer;
    const double bound = std::sqrt(6.0 / static_cast<double>(2 * h + 1));
    std::uniform_real_distribution<double> dist(-bound, bound);
    layer.attention = Matrix(2 * h, 1);
    for (double& v : layer.attention.data()) v = dist(rng);
    layer.mlp = init_mlp(h, h, h, config.mlp_depth, rng);
    params.layers.push_back(std::move(layer));
  }
  params.output = init_mlp(h * (config.layers + 1), h, 1, config.mlp_depth, rng);
  return params;
}

std::size_t count_params(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.input_dim;
  const std::size_t h = config.hidden_dim;
  const std::size_t k = config.layers;
  const std::size_t depth = config.mlp_depth;
  return mlp_count(d, h, h, depth) + k * (2 * h + mlp_count(h, h, h, depth)) +
         mlp_count(h * (k + 1), h, 1, depth);
}

std::size_t scalar_count(const ModelParams& params) {
  std::size_t total = 0;
  for_each_named(params, [&](const std::string&, const Matrix& m) { total += m.size(); });
  return total;
}

std::vector<Matrix> flatten(const ModelParams& params) {
  std::vector<Matrix> out;
  for_each_named(params, [&](const std::string&, const Matrix& m) { out.push_back(m); });
  return out;
}

void assign(ModelParams& params, const std::vector<Matrix>& tensors) {
  std::size_t i = 0;
  for_each_named(params, [&](const std::string& name, Matrix& m) {
    if (i >= tensors.size()) throw std::invalid_argument("assign: too few tensors at " + name);
    if (!m.same_shape(tensors[i])) {
      throw std::invalid_argument("assign: " + name + " expects " + m.shape_str() + ", got " +
                                  tensors[i].shape_str());
    }
    m = tensors[i++];
  });
  if (i != tensors.size()) throw std::invalid_argument("assign: too many tensors");
}

ModelParams unflatten(const ModelConfig& config, const std::vector<Matrix>& tensors) {
  ModelParams params = init_params(config);
  assign(params, tensors);
  return params;
}

ParamVars bind(ad::Tape& tape, const ModelParams& params, bool requires_grad) {
  ParamVars vars;
  auto bind_mlp = [&](const MlpParams<Matrix>& src, MlpParams<ad::Var>& dst) {
    for (std::size_t i = 0; i < src.weights.size(); ++i) {
      dst.weights.push_back(tape.leaf(src.weights[i], requires_grad));
      dst.biases.push_back(tape.leaf(src.biases[i], requires_grad));
    }
  };
  bind_mlp(params.embedding, vars.embedding);
  for (const auto& layer : params.layers) {
    LayerParamsT<ad::Var> lv;
    lv.attention = tape.leaf(layer.attention, requires_grad);
    bind_mlp(layer.mlp, lv.mlp);
    vars.layers.push_back(std::move(lv));
  }
  bind_mlp(params.output, vars.output);
  return vars;
}

Matrix prepare_input(const FeatureMatrix& features, const ModelConfig& config) {
  if (config.standardize_features) return standardize(features).values;
  return features.values;
}

ad::Var mlp_forward(const MlpParams<ad::Var>& mlp, ad::Var x) {
  for (std::size_t i = 0; i < mlp.weights.size(); ++i) {
    x = ad::affine(x, mlp.weights[i], mlp.biases[i]);
    if (i + 1 < mlp.weights.size()) x = ad::relu(x);
  }
  return x;
}

ad::Var embed(ad::Var x, const ParamVars& params, const ModelConfig& config) {
  if (x.cols() != config.input_dim) {
    throw std::invalid_argument("embed: input has " + std::to_string(x.cols()) +
                                " feature columns, model expects " +
                                std::to_string(config.input_dim));
  }
  return mlp_forward(params.embedding, x);
}

namespace {

// Filter outputs for one layer. Powers of A and P are built by repeated
// single passes so every filter shares the same intermediates.
std::vector<ad::Var> filter_bank(const Graph& g, ad::Var h, const std::vector<FilterSpec>& filters) {
  int max_low = 0;
  int max_band = -1;
  for (const auto& f : filters) {
    if (f.kind == FilterSpec::Kind::LowPass) max_low = std::max(max_low, f.order);
    else max_band = std::max(max_band, f.order);
  }

  std::map<int, ad::Var> adj_powers;
  {
    ad::Var cur = h;
    for (int r = 1; r <= max_low; ++r) {
      cur = ad::sparse_op_apply(g, {ad::SparseOpKind::RenormAdj, 1}, cur);
      adj_powers[r] = cur;
    }
  }

  std::map<int, ad::Var> walk_powers;  // keys are 2^j
  walk_powers[0] = h;
  if (max_band >= 0) {
    const int max_t = 1 << max_band;
    ad::Var cur = h;
    for (int t = 1; t <= max_t; ++t) {
      cur = ad::sparse_op_apply(g, {ad::SparseOpKind::Walk, 1}, cur);
      if ((t & (t - 1)) == 0) walk_powers[t] = cur;
    }
  }

  std::vector<ad::Var> out;
  out.reserve(filters.size());
  for (const auto& f : filters) {
    if (f.kind == FilterSpec::Kind::LowPass) {
      out.push_back(adj_powers.at(f.order));
    } else if (f.order == 0) {
      out.push_back(ad::sub(h, walk_powers.at(1)));
    } else {
      out.push_back(ad::sub(walk_powers.at(1 << (f.order - 1)), walk_powers.at(1 << f.order)));
    }
  }
  return out;
}

}  // namespace

LayerOutput layer_forward(ad::Var previous, const Graph& g, const LayerParamsT<ad::Var>& layer,
                          const ModelConfig& config) {
  if (previous.cols() != config.hidden_dim || previous.rows() != g.node_count()) {
    throw std::invalid_argument("layer_forward: representation is " + previous.value().shape_str() +
                                ", expected " + std::to_string(g.node_count()) + "x" +
                                std::to_string(config.hidden_dim));
  }
  const auto filters = config.active_filters();
  const auto filtered = filter_bank(g, previous, filters);

  std::vector<ad::Var> scores;
  scores.reserve(filtered.size());
  for (const ad::Var& hf : filtered) {
    ad::Var joined = ad::leaky_relu(ad::concat_columns(hf, previous), ad::kAttentionLeakySlope);
    scores.push_back(ad::row_dot(joined, layer.attention));
  }

  LayerOutput out;
  out.attention = ad::softmax_over_group(scores);
  ad::Var aggregated = ad::elementwise_mul(out.attention[0], filtered[0]);
  for (std::size_t f = 1; f < filtered.size(); ++f) {
    aggregated = ad::add(aggregated, ad::elementwise_mul(out.attention[f], filtered[f]));
  }
  out.hidden = mlp_forward(layer.mlp, aggregated);
  return out;
}

ForwardResult forward(ad::Tape& tape, const Graph& g, const Matrix& input,
                      const ParamVars& params, const ModelConfig& config) {
  if (input.rows() != g.node_count()) {
    throw std::invalid_argument("forward: feature rows do not match node count");
  }
  if (params.layers.size() != config.layers) {
    throw std::invalid_argument("forward: parameters do not match the configured layer count");
  }
  ForwardResult result;
  ad::Var h = embed(tape.constant(input), params, config);
  result.readouts.push_back(h);
  for (const auto& layer : params.layers) {
    LayerOutput lo = layer_forward(h, g, layer, config);
    h = lo.hidden;
    result.readouts.push_back(h);
    result.attention.push_back(std::move(lo.attention));
  }
  ad::Var cat = ad::concat_columns(result.readouts);
  result.logits = mlp_forward(params.output, cat);
  result.probabilities = ad::min_max_normalize(result.logits);
  return result;
}

Prediction predict(const Graph& g, const FeatureMatrix& features, const ModelParams& params,
                   const ModelConfig& config) {
  ad::Tape tape;
  ParamVars vars = bind(tape, params, false);
  ForwardResult fr = forward(tape, g, prepare_input(features, config), vars, config);
  Prediction out;
  out.probabilities = fr.probabilities.value().data();
  for (const auto& r : fr.readouts) out.readouts.push_back(r.value());
  for (const auto& layer : fr.attention) {
    std::vector<std::vector<double>> weights;
    for (const auto& a : layer) weights.push_back(a.value().data());
    out.attention.push_back(std::move(weights));
  }
  return out;
}

}  // namespace scatclique

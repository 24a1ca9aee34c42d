#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scatclique/datagen.hpp"
#include "scatclique/decoder.hpp"
#include "scatclique/model.hpp"
#include "scatclique/oracles.hpp"

namespace scatclique {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// auto: manifest mc_size, else exact solver. provided: manifest only.
// exact: exact solver only.
enum class ReferenceMode { Auto, Exact, Provided };
ReferenceMode parse_reference_mode(const std::string& text);

struct ReferenceOptions {
  ReferenceMode mode = ReferenceMode::Auto;
  std::size_t exact_node_cap = kDefaultExactNodeCap;
};

// Resolves the reference size for one instance or throws EvalError naming it.
std::size_t reference_size(const Instance& inst, const ReferenceOptions& options);

struct MethodRun {
  NodeSet clique;
  double forward_seconds = 0.0;
  double decode_seconds = 0.0;
};

// A named predictor. `run` must be safe to call concurrently on distinct instances.
struct Method {
  std::string label;
  std::function<MethodRun(const Instance&, const FeatureMatrix&)> run;
  bool needs_features = false;
  nlohmann::json config = nlohmann::json::object();
};

// Decoder settings per instance: tau from the request or from the instance's
// size hint.
struct DecodeRequest {
  std::size_t kappa = 1;
  std::optional<std::size_t> tau;
  std::size_t sampler_threads = 1;
};

DecoderConfig decoder_config_for(const Instance& inst, const DecodeRequest& request);

Method model_method(std::string label, ModelParams params, ModelConfig config, DecodeRequest request);
Method local_search_method(const HeuristicConfig& cfg);
Method exact_method(std::size_t node_cap = kDefaultExactNodeCap);

struct EvalRow {
  std::string instance_id;
  std::size_t pred_size = 0;
  std::size_t ref_size = 0;
  double score = 0.0;
  double forward_seconds = 0.0;
  double decode_seconds = 0.0;
  NodeSet clique;
};

struct EvalReport {
  std::string method;
  std::vector<EvalRow> rows;
  double mean_score = 0.0;
  double std_score = 0.0;  // population standard deviation over graphs
  double mean_seconds_per_graph = 0.0;  // forward + decode
  nlohmann::json config;
};

// Scores every instance. Each prediction is checked to be a clique before it
// enters any aggregate; a non-clique raises EvalError.
EvalReport evaluate_method(const std::vector<Instance>& dataset, const Method& method,
                           const ReferenceOptions& reference, std::size_t threads = 1);

EvalReport evaluate(const std::vector<Instance>& dataset, const ModelParams& params,
                    const ModelConfig& mcfg, const DecodeRequest& dcfg,
                    const ReferenceOptions& reference, std::size_t threads = 1);

// Per-instance CSV: method,instance_id,pred_size,ref_size,score,forward_s,decode_s.
// forward_s and decode_s are the only run-dependent columns.
void write_eval_csv(std::ostream& out, const EvalReport& report);

struct BenchmarkRow {
  std::string method;
  double mean_score = 0.0;
  double std_score = 0.0;
  double mean_seconds_per_graph = 0.0;
  std::string error;  // non-empty when the method failed
};

std::vector<BenchmarkRow> benchmark(const std::vector<Instance>& dataset,
                                    const std::vector<Method>& methods,
                                    const ReferenceOptions& reference, std::size_t threads = 1);

// CSV: method,mean_score,std_score,mean_s_per_graph,error
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

// Parses "local-search:<eta1>:<eta2>[:seed]" and "exact[:cap]".
Method parse_baseline_method(const std::string& spec);

}  // namespace scatclique

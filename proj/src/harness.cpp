#include "scatclique/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "scatclique/parallel.hpp"

namespace scatclique {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

}  // namespace

ReferenceMode parse_reference_mode(const std::string& text) {
  if (text == "auto") return ReferenceMode::Auto;
  if (text == "exact") return ReferenceMode::Exact;
  if (text == "provided") return ReferenceMode::Provided;
  throw std::invalid_argument("unknown reference mode '" + text + "' (auto, exact, provided)");
}

std::size_t reference_size(const Instance& inst, const ReferenceOptions& options) {
  if (options.mode != ReferenceMode::Exact && inst.mc_size) return *inst.mc_size;
  if (options.mode == ReferenceMode::Provided) {
    throw EvalError("instance '" + inst.id + "' has no mc_size in its manifest");
  }
  if (inst.graph.node_count() > options.exact_node_cap) {
    throw EvalError("instance '" + inst.id + "' has no provided reference and " +
                    std::to_string(inst.graph.node_count()) +
                    " nodes exceeds the exact-solver cap of " +
                    std::to_string(options.exact_node_cap));
  }
  return exact_max_clique(inst.graph, options.exact_node_cap).size();
}

DecoderConfig decoder_config_for(const Instance& inst, const DecodeRequest& request) {
  const std::size_t n = inst.graph.node_count();
  std::size_t hint = 0;
  if (inst.mc_size) hint = *inst.mc_size;
  else if (inst.planted) hint = inst.planted->size();
  DecoderConfig cfg;
  cfg.tau = request.tau ? std::min(*request.tau, n) : default_tau(n, hint);
  cfg.kappa = std::min(request.kappa, cfg.tau);
  return cfg;
}

Method model_method(std::string label, ModelParams params, ModelConfig config, DecodeRequest request) {
  Method m;
  m.label = std::move(label);
  m.needs_features = true;
  m.config = {{"kind", "model"},
              {"kappa", request.kappa},
              {"tau", request.tau ? json(*request.tau) : json("default")},
              {"low_pass_only", config.low_pass_only},
              {"hidden_dim", config.hidden_dim},
              {"layers", config.layers}};
  m.run = [params = std::move(params), config = std::move(config), request](
              const Instance& inst, const FeatureMatrix& features) {
    MethodRun run;
    auto start = std::chrono::steady_clock::now();
    const Prediction pred = predict(inst.graph, features, params, config);
    run.forward_seconds = seconds_since(start);
    start = std::chrono::steady_clock::now();
    CliqueResult res = decode(inst.graph, pred.probabilities, decoder_config_for(inst, request),
                              request.sampler_threads);
    run.decode_seconds = seconds_since(start);
    run.clique = std::move(res.nodes);
    return run;
  };
  return m;
}

Method local_search_method(const HeuristicConfig& cfg) {
  cfg.validate();
  Method m;
  m.label = "local-search:" + std::to_string(cfg.eta1) + ":" + std::to_string(cfg.eta2);
  m.config = {{"kind", "local-search"}, {"eta1", cfg.eta1}, {"eta2", cfg.eta2}, {"seed", cfg.seed}};
  m.run = [cfg](const Instance& inst, const FeatureMatrix&) {
    MethodRun run;
    const auto start = std::chrono::steady_clock::now();
    run.clique = local_search(inst.graph, cfg);
    run.decode_seconds = seconds_since(start);
    return run;
  };
  return m;
}

Method exact_method(std::size_t node_cap) {
  Method m;
  m.label = "exact";
  m.config = {{"kind", "exact"}, {"node_cap", node_cap}};
  m.run = [node_cap](const Instance& inst, const FeatureMatrix&) {
    MethodRun run;
    const auto start = std::chrono::steady_clock::now();
    run.clique = exact_max_clique(inst.graph, node_cap);
    run.decode_seconds = seconds_since(start);
    return run;
  };
  return m;
}

EvalReport evaluate_method(const std::vector<Instance>& dataset, const Method& method,
                           const ReferenceOptions& reference, std::size_t threads) {
  if (dataset.empty()) throw EvalError("evaluate: dataset is empty");
  std::vector<std::size_t> refs(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) refs[i] = reference_size(dataset[i], reference);

  std::vector<FeatureMatrix> features(dataset.size());
  if (method.needs_features) {
    parallel_for(dataset.size(), threads,
                 [&](std::size_t i) { features[i] = compute_features(dataset[i].graph); });
  }

  std::vector<MethodRun> runs(dataset.size());
  parallel_for(dataset.size(), threads,
               [&](std::size_t i) { runs[i] = method.run(dataset[i], features[i]); });

  EvalReport report;
  report.method = method.label;
  report.config = method.config;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    MethodRun& run = runs[i];
    if (run.clique.empty() || !is_clique(dataset[i].graph, run.clique)) {
      throw EvalError(method.label + " produced a non-clique on instance '" + dataset[i].id + "'");
    }
    EvalRow row;
    row.instance_id = dataset[i].id;
    row.pred_size = run.clique.size();
    row.ref_size = refs[i];
    row.score = approximation_score(row.pred_size, row.ref_size);
    row.forward_seconds = run.forward_seconds;
    row.decode_seconds = run.decode_seconds;
    row.clique = std::move(run.clique);
    report.rows.push_back(std::move(row));
  }

  const double count = static_cast<double>(report.rows.size());
  double total = 0.0;
  double seconds = 0.0;
  for (const auto& r : report.rows) {
    total += r.score;
    seconds += r.forward_seconds + r.decode_seconds;
  }
  report.mean_score = total / count;
  double var = 0.0;
  for (const auto& r : report.rows) var += (r.score - report.mean_score) * (r.score - report.mean_score);
  report.std_score = std::sqrt(var / count);
  report.mean_seconds_per_graph = seconds / count;
  return report;
}

EvalReport evaluate(const std::vector<Instance>& dataset, const ModelParams& params,
                    const ModelConfig& mcfg, const DecodeRequest& dcfg,
                    const ReferenceOptions& reference, std::size_t threads) {
  return evaluate_method(dataset, model_method(mcfg.low_pass_only ? "low-pass" : "hybrid", params, mcfg, dcfg),
                         reference, threads);
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << "# timing: forward_s is the model forward pass, decode_s the decoder or solver; "
         "seconds per graph, excluding feature extraction, dataset load and report write\n";
  out << "method,instance_id,pred_size,ref_size,score,forward_s,decode_s\n";
  for (const auto& r : report.rows) {
    std::ostringstream score;
    score << std::setprecision(12) << r.score;
    std::ostringstream fwd;
    std::ostringstream dec;
    fwd << std::scientific << std::setprecision(6) << r.forward_seconds;
    dec << std::scientific << std::setprecision(6) << r.decode_seconds;
    out << report.method << ',' << r.instance_id << ',' << r.pred_size << ',' << r.ref_size << ','
        << score.str() << ',' << fwd.str() << ',' << dec.str() << '\n';
  }
}

std::vector<BenchmarkRow> benchmark(const std::vector<Instance>& dataset,
                                    const std::vector<Method>& methods,
                                    const ReferenceOptions& reference, std::size_t threads) {
  if (dataset.empty()) throw EvalError("benchmark: dataset is empty");
  if (methods.empty()) throw EvalError("benchmark: no methods given");
  std::vector<BenchmarkRow> rows;
  for (const Method& m : methods) {
    BenchmarkRow row;
    row.method = m.label;
    try {
      const EvalReport rep = evaluate_method(dataset, m, reference, threads);
      row.mean_score = rep.mean_score;
      row.std_score = rep.std_score;
      row.mean_seconds_per_graph = rep.mean_seconds_per_graph;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "method,mean_score,std_score,mean_s_per_graph,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (char& c : err) {
      if (c == ',' || c == '\n' || c == '"') c = ';';
    }
    if (!r.error.empty()) {
      out << r.method << ",ERROR,ERROR,ERROR," << err << '\n';
      continue;
    }
    std::ostringstream line;
    line << r.method << ',' << std::setprecision(6) << std::fixed << r.mean_score << ','
         << r.std_score << ',' << std::scientific << r.mean_seconds_per_graph << ",\n";
    out << line.str();
  }
}

Method parse_baseline_method(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("empty method spec");
  if (parts[0] == "exact") {
    if (parts.size() > 2) throw std::invalid_argument("bad method spec '" + spec + "'");
    return exact_method(parts.size() == 2 ? std::stoul(parts[1]) : kDefaultExactNodeCap);
  }
  if (parts[0] == "local-search") {
    if (parts.size() < 3 || parts.size() > 4) {
      throw std::invalid_argument("expected local-search:<eta1>:<eta2>[:seed], got '" + spec + "'");
    }
    HeuristicConfig cfg;
    cfg.eta1 = std::stoul(parts[1]);
    cfg.eta2 = std::stoul(parts[2]);
    if (parts.size() == 4) cfg.seed = std::stoull(parts[3]);
    return local_search_method(cfg);
  }
  throw std::invalid_argument("unknown method '" + spec + "'");
}

}  // namespace scatclique

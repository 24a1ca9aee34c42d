#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "scatclique/checkpoint.hpp"
#include "scatclique/datagen.hpp"
#include "scatclique/decoder.hpp"
#include "scatclique/features.hpp"
#include "scatclique/harness.hpp"
#include "scatclique/oracles.hpp"
#include "scatclique/parallel.hpp"
#include "scatclique/training.hpp"

namespace fs = std::filesystem;
using namespace scatclique;
using nlohmann::json;

namespace {

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::string join_nodes(const NodeSet& nodes) {
  std::string s;
  for (NodeId v : nodes) s += (s.empty() ? "" : " ") + std::to_string(v);
  return s;
}

std::size_t dataset_kappa(const Dataset& ds, std::size_t fallback) {
  if (ds.info.contains("kappa")) return ds.info["kappa"].get<std::size_t>();
  return fallback;
}

std::string model_label(const ModelConfig& cfg) { return cfg.low_pass_only ? "low-pass" : "hybrid"; }

struct GenerateOpts {
  std::string preset;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateOpts& o) {
  const Preset& preset = find_preset(o.preset);
  Dataset ds;
  ds.instances = generate(preset, o.count, o.seed);
  ds.info = {{"preset", preset.name}, {"generator", preset.generator}, {"params", preset.params},
             {"seed", o.seed},        {"count", o.count},               {"kappa", preset.kappa}};
  save_dataset(ds, o.out);
  std::cout << "wrote " << ds.instances.size() << " instances to " << o.out << '\n';
  return 0;
}

struct FeaturesOpts {
  std::string data;
  std::string out;
  bool standardize = false;
};

int run_features(const FeaturesOpts& o) {
  const Dataset ds = load_dataset(o.data);
  if (ds.instances.empty()) throw std::runtime_error("no instances in '" + o.data + "'");
  auto features_of = [&](const Instance& inst) {
    FeatureMatrix f = compute_features(inst.graph);
    return o.standardize ? standardize(std::move(f)) : f;
  };
  if (ds.instances.size() == 1 && fs::path(o.out).extension() == ".csv") {
    auto out = open_output(o.out);
    write_features_csv(out, features_of(ds.instances[0]));
    return 0;
  }
  fs::create_directories(o.out);
  for (const Instance& inst : ds.instances) {
    auto out = open_output((fs::path(o.out) / (inst.id + ".csv")).string());
    write_features_csv(out, features_of(inst));
  }
  std::cout << "wrote features for " << ds.instances.size() << " instances to " << o.out << '\n';
  return 0;
}

struct TrainOpts {
  std::string data;
  std::string out;
  std::string report;
  TrainConfig train;
  ModelConfig model;
  std::vector<std::string> filters;
  double clip = 0.0;
};

int run_train(TrainOpts o) {
  const Dataset ds = load_dataset(o.data);
  if (!o.filters.empty()) {
    o.model.filters.clear();
    for (const auto& f : o.filters) o.model.filters.push_back(FilterSpec::parse(f));
  }
  if (o.clip > 0.0) o.train.clip_norm = o.clip;
  o.model.seed = o.train.seed;
  const TrainResult res = train(ds.instances, o.model, o.train);
  const TrainReport& rep = res.report;

  Checkpoint ckpt{o.model, res.params, to_json(rep), to_json(o.train)};
  save_checkpoint(ckpt, o.out);
  const std::string report_path =
      o.report.empty() ? fs::path(o.out).replace_extension(".train.csv").string() : o.report;
  auto out = open_output(report_path);
  out << "epoch,train_loss,validation_loss\n" << std::setprecision(17);
  for (const auto& e : rep.epochs) out << e.epoch << ',' << e.train_loss << ',' << e.validation_loss << '\n';

  std::cout << "trained " << count_params(o.model) << " parameters on " << rep.train_count
            << " graphs (" << rep.validation_count << " validation) for " << rep.epochs.size() - 1
            << " epochs; best epoch " << rep.best_epoch << " validation loss " << rep.best_validation_loss
            << " (initial " << rep.initial_validation_loss << ")\n";
  if (rep.skipped_steps) std::cout << "skipped " << rep.skipped_steps << " non-finite steps\n";
  if (rep.diverged) {
    std::cerr << "training diverged: " << rep.diagnostic << "; kept best checkpoint\n";
    return 2;
  }
  return 0;
}

struct EvalOpts {
  std::string data;
  std::string ckpt;
  std::size_t kappa = 0;
  std::size_t tau = 0;
  std::string reference = "auto";
  std::size_t exact_cap = kDefaultExactNodeCap;
  std::string out;
  std::size_t threads = 0;
};

ReferenceOptions reference_options(const EvalOpts& o) {
  return {parse_reference_mode(o.reference), o.exact_cap};
}

DecodeRequest decode_request(const EvalOpts& o, const Dataset& ds) {
  DecodeRequest req;
  req.kappa = o.kappa ? o.kappa : dataset_kappa(ds, 1);
  if (o.tau) req.tau = o.tau;
  return req;
}

int run_evaluate(const EvalOpts& o) {
  const Dataset ds = load_dataset(o.data);
  const Checkpoint ckpt = load_checkpoint(o.ckpt);
  const EvalReport rep = evaluate_method(
      ds.instances, model_method(model_label(ckpt.config), ckpt.params, ckpt.config, decode_request(o, ds)),
      reference_options(o), o.threads ? o.threads : default_thread_count());
  if (!o.out.empty()) {
    auto out = open_output(o.out);
    write_eval_csv(out, rep);
  }
  std::cout << rep.method << ": score " << std::fixed << std::setprecision(4) << rep.mean_score << " +- "
            << rep.std_score << " over " << rep.rows.size() << " graphs, " << std::scientific
            << std::setprecision(3) << rep.mean_seconds_per_graph << " s/G\n";
  return 0;
}

struct DecodeOpts {
  std::string data;
  std::string ckpt;
  std::string probs;
  std::size_t kappa = 1;
  std::size_t tau = 0;
  std::string out;
  std::size_t threads = 0;
};

std::vector<double> read_probabilities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<double> p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected a number");
    p.push_back(v);
  }
  return p;
}

int run_decode(const DecodeOpts& o) {
  if (o.ckpt.empty() == o.probs.empty()) throw std::runtime_error("decode needs exactly one of --ckpt, --probs");
  const Dataset ds = load_dataset(o.data);
  const std::size_t threads = o.threads ? o.threads : default_thread_count();
  std::optional<Checkpoint> ckpt;
  std::vector<double> fixed_p;
  if (!o.ckpt.empty()) ckpt = load_checkpoint(o.ckpt);
  else {
    if (ds.instances.size() != 1) throw std::runtime_error("--probs needs a single-graph input");
    fixed_p = read_probabilities(o.probs);
  }

  std::ostringstream table;
  table << "instance_id,size,sampler,nodes\n";
  for (const Instance& inst : ds.instances) {
    const std::vector<double> p =
        ckpt ? predict(inst.graph, compute_features(inst.graph), ckpt->params, ckpt->config).probabilities
             : fixed_p;
    DecodeRequest req{o.kappa, o.tau ? std::optional<std::size_t>(o.tau) : std::nullopt, threads};
    DecoderConfig cfg = decoder_config_for(inst, req);
    cfg.kappa = o.kappa;
    const CliqueResult r = decode(inst.graph, p, cfg, threads);
    if (r.tau_clamped) std::cerr << inst.id << ": tau clamped to n = " << inst.graph.node_count() << '\n';
    table << inst.id << ',' << r.size << ',' << r.sampler_index << ',' << join_nodes(r.nodes) << '\n';
  }
  if (o.out.empty()) std::cout << table.str();
  else open_output(o.out) << table.str();
  return 0;
}

struct OracleOpts {
  std::string data;
  std::string method = "exact";
  std::string out;
  std::size_t threads = 0;
};

int run_oracle(const OracleOpts& o) {
  const Dataset ds = load_dataset(o.data);
  const Method m = parse_baseline_method(o.method);
  std::vector<NodeSet> found(ds.instances.size());
  parallel_for(ds.instances.size(), o.threads ? o.threads : default_thread_count(),
               [&](std::size_t i) { found[i] = m.run(ds.instances[i], FeatureMatrix{}).clique; });
  std::ostringstream table;
  table << "method,instance_id,size,nodes\n";
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!is_clique(ds.instances[i].graph, found[i])) {
      throw EvalError(m.label + " produced a non-clique on '" + ds.instances[i].id + "'");
    }
    table << m.label << ',' << ds.instances[i].id << ',' << found[i].size() << ',' << join_nodes(found[i]) << '\n';
  }
  if (o.out.empty()) std::cout << table.str();
  else open_output(o.out) << table.str();
  return 0;
}

struct BenchOpts {
  EvalOpts eval;
  std::vector<std::string> ckpts;
  std::vector<std::string> methods;
};

int run_benchmark(const BenchOpts& o) {
  const Dataset ds = load_dataset(o.eval.data);
  std::vector<Method> methods;
  for (const auto& path : o.ckpts) {
    // label=path names the row explicitly.
    std::string label;
    std::string file = path;
    if (const auto eq = path.find('='); eq != std::string::npos) {
      label = path.substr(0, eq);
      file = path.substr(eq + 1);
    }
    const Checkpoint c = load_checkpoint(file);
    methods.push_back(model_method(label.empty() ? model_label(c.config) : label, c.params, c.config,
                                   decode_request(o.eval, ds)));
  }
  for (const auto& spec : o.methods) methods.push_back(parse_baseline_method(spec));
  const auto rows = benchmark(ds.instances, methods, reference_options(o.eval),
                              o.eval.threads ? o.eval.threads : default_thread_count());
  if (o.eval.out.empty()) write_benchmark_csv(std::cout, rows);
  else {
    auto out = open_output(o.eval.out);
    write_benchmark_csv(out, rows);
    write_benchmark_csv(std::cout, rows);
  }
  for (const auto& r : rows) {
    if (!r.error.empty()) return 3;
  }
  return 0;
}

void add_eval_flags(CLI::App* cmd, EvalOpts& o, bool needs_ckpt) {
  cmd->add_option("--data", o.data, "Dataset directory, manifest or edge-list file")->required();
  if (needs_ckpt) cmd->add_option("--ckpt", o.ckpt, "Model checkpoint")->required()->check(CLI::ExistingFile);
  cmd->add_option("--kappa", o.kappa, "Decoder samplers (default: dataset preset, else 1)");
  cmd->add_option("--tau", o.tau, "Decoder scan length (default: min(n, 4 * expected size))");
  cmd->add_option("--reference", o.reference, "Reference sizes: auto, exact or provided")
      ->check(CLI::IsMember({"auto", "exact", "provided"}));
  cmd->add_option("--exact-cap", o.exact_cap, "Largest graph handed to the exact solver");
  cmd->add_option("--out", o.out, "CSV report path");
  cmd->add_option("--threads", o.threads, "Worker threads (default: SCATCLIQUE_THREADS or hardware)");
}


// CLI11 only reads config files for the root app, so `train --config FILE` is
// expanded here: every key=value line not already given on the command line
// becomes --key=value. Blank lines, # comments and [section] headers are skipped.
std::vector<std::string> with_train_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] != "train") {
    std::reverse(args.begin(), args.end());
    return args;
  }
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") path = eq == std::string::npos ? (i + 1 < args.size() ? args[i + 1] : "") : a.substr(eq + 1);
  }
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> extra;
    while (std::getline(in, line)) {
      ++lineno;
      auto trim = [](std::string x) {
        const auto b = x.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return x.substr(b, x.find_last_not_of(" \t\r") - b + 1);
      };
      line = trim(line);
      if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
      }
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      std::replace(key.begin(), key.end(), '_', '-');
      if (given.count(key) || key == "config") continue;
      if (key == "low-pass-only" || key == "standardize") {
        if (value == "true" || value == "1") extra.push_back("--" + key);
        else if (value != "false" && value != "0") {
          throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + key + " expects true or false");
        }
        continue;
      }
      extra.push_back("--" + key + "=" + value);
    }
    args.insert(args.begin() + 1, extra.begin(), extra.end());
  }
  // CLI11 consumes the vector form back to front.
  std::reverse(args.begin(), args.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum clique approximation with a scattering GNN", "scatclique"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic dataset");
  g->add_option("--preset", gen.preset, "Preset name")->required();
  g->add_option("--count", gen.count, "Number of instances");
  g->add_option("--seed", gen.seed, "Base seed; instance i uses seed + i");
  g->add_option("--out", gen.out, "Output directory")->required();

  FeaturesOpts feat;
  auto* f = app.add_subcommand("features", "Write per-node input features as CSV");
  f->add_option("--data", feat.data, "Dataset or edge-list file")->required();
  f->add_option("--out", feat.out, "CSV file (single graph) or directory")->required();
  f->add_flag("--standardize", feat.standardize, "Per-graph z-score");

  TrainOpts tr;
  auto* t = app.add_subcommand("train", "Train a model without supervision");
  std::string train_config;
  t->add_option("--config", train_config, "key=value file with any of these flags (command line wins)")
      ->check(CLI::ExistingFile);
  t->add_option("--data", tr.data, "Training dataset")->required();
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--report", tr.report, "Per-epoch loss CSV (default: <out>.train.csv)");
  t->add_option("--epochs", tr.train.epochs, "Epochs");
  t->add_option("--beta", tr.train.loss.beta, "Weight of the complement term");
  t->add_option("--seed", tr.train.seed, "Seed for initialization, split and shuffling");
  t->add_option("--lr", tr.train.learning_rate, "Learning rate");
  t->add_option("--adam-beta1", tr.train.beta1, "First moment decay");
  t->add_option("--adam-beta2", tr.train.beta2, "Second moment decay");
  t->add_option("--adam-eps", tr.train.epsilon, "Adam epsilon");
  t->add_option("--clip-norm", tr.clip, "Global gradient norm clip (0 disables)");
  t->add_option("--patience", tr.train.patience, "Early-stopping patience in epochs (0 disables)");
  t->add_option("--val-frac", tr.train.validation_fraction, "Validation fraction");
  t->add_option("--hidden", tr.model.hidden_dim, "Hidden width");
  t->add_option("--layers", tr.model.layers, "Diffusion layers");
  t->add_option("--mlp-depth", tr.model.mlp_depth, "Linear maps per MLP");
  t->add_option("--filters", tr.filters, "Filter bank, e.g. A1,A2,Psi1")->delimiter(',');
  t->add_flag("--low-pass-only", tr.model.low_pass_only, "Ablation: drop band-pass filters");
  t->add_flag("--standardize", tr.model.standardize_features, "Per-graph z-score of features");

  EvalOpts ev;
  auto* e = app.add_subcommand("evaluate", "Score a checkpoint against reference clique sizes");
  add_eval_flags(e, ev, true);

  DecodeOpts dec;
  auto* d = app.add_subcommand("decode", "Decode cliques from a checkpoint or a probability file");
  d->add_option("--data", dec.data, "Dataset or edge-list file")->required();
  d->add_option("--ckpt", dec.ckpt, "Model checkpoint");
  d->add_option("--probs", dec.probs, "One probability per line (single graph)");
  d->add_option("--kappa", dec.kappa, "Samplers");
  d->add_option("--tau", dec.tau, "Scan length (default: min(n, 4 * expected size))");
  d->add_option("--out", dec.out, "CSV output (default: stdout)");
  d->add_option("--threads", dec.threads, "Sampler threads");

  OracleOpts orc;
  auto* o = app.add_subcommand("oracle", "Run the exact or local-search solver");
  o->add_option("--data", orc.data, "Dataset or edge-list file")->required();
  o->add_option("--method", orc.method, "exact[:cap] or local-search:<eta1>:<eta2>[:seed]");
  o->add_option("--out", orc.out, "CSV output (default: stdout)");
  o->add_option("--threads", orc.threads, "Worker threads");

  BenchOpts bench;
  auto* b = app.add_subcommand("benchmark", "Compare models and baselines on one dataset");
  add_eval_flags(b, bench.eval, false);
  b->add_option("--ckpt", bench.ckpts, "Checkpoint, optionally label=path (repeatable)");
  b->add_option("--method", bench.methods, "Baseline spec (repeatable)");

  std::vector<std::string> args;
  try {
    args = with_train_config(argc, argv);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  try {
    app.parse(args);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (*g) return run_generate(gen);
    if (*f) return run_features(feat);
    if (*t) return run_train(tr);
    if (*e) return run_evaluate(ev);
    if (*d) return run_decode(dec);
    if (*o) return run_oracle(orc);
    if (*b) return run_benchmark(bench);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 1;
}

#include "scatclique/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace scatclique {

namespace fs = std::filesystem;
using nlohmann::json;

void Instance::validate() const {
  if (planted) {
    for (NodeId v : *planted) {
      if (v >= graph.node_count()) {
        throw DatasetError(id + ": planted node " + std::to_string(v) + " out of range");
      }
    }
    if (!is_clique(graph, *planted)) throw DatasetError(id + ": planted set is not a clique");
    if (mc_size && *mc_size < planted->size()) {
      throw DatasetError(id + ": mc_size " + std::to_string(*mc_size) +
                         " is below the planted clique size " + std::to_string(planted->size()));
    }
  }
}

Instance planted_clique(std::size_t n, double edge_prob, std::size_t q, std::uint64_t seed) {
  if (q < 1 || q > n) throw std::invalid_argument("planted_clique: need 1 <= q <= n");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw std::invalid_argument("planted_clique: edge_prob must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  for (std::size_t i = 0; i < q; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(nodes[i], nodes[pick(rng)]);
  }
  std::vector<char> in_clique(n, 0);
  NodeSet planted(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(q));
  std::sort(planted.begin(), planted.end());
  for (NodeId v : planted) in_clique[v] = 1;

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double draw = coin(rng);
      if ((in_clique[u] && in_clique[v]) || draw < edge_prob) edges.emplace_back(u, v);
    }
  }

  Instance inst;
  inst.graph = Graph::from_edge_list(edges, n);
  inst.planted = std::move(planted);
  inst.meta.generator = "planted_clique";
  inst.meta.params = {{"n", n}, {"edge_prob", edge_prob}, {"q", q}};
  inst.meta.seed = seed;
  return inst;
}

Instance rb_hard(std::size_t groups, std::size_t domain, double hardness, std::uint64_t seed) {
  if (groups < 2 || domain < 2) throw std::invalid_argument("rb_hard: need groups, domain >= 2");
  if (!(hardness >= 0.0 && hardness < 1.0)) {
    throw std::invalid_argument("rb_hard: hardness must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> hidden(groups);
  std::uniform_int_distribution<std::size_t> pick(0, domain - 1);
  for (auto& h : hidden) h = pick(rng);

  const std::size_t pairs_per_block = domain * domain;
  const std::size_t removals = std::min<std::size_t>(
      static_cast<std::size_t>(std::llround(hardness * static_cast<double>(pairs_per_block))),
      pairs_per_block - 1);

  auto node = [domain](std::size_t group, std::size_t value) {
    return static_cast<NodeId>(group * domain + value);
  };
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::pair<std::size_t, std::size_t>> block;
  for (std::size_t a = 0; a < groups; ++a) {
    for (std::size_t b = a + 1; b < groups; ++b) {
      block.clear();
      for (std::size_t i = 0; i < domain; ++i) {
        for (std::size_t j = 0; j < domain; ++j) {
          if (i != hidden[a] || j != hidden[b]) block.emplace_back(i, j);
        }
      }
      std::shuffle(block.begin(), block.end(), rng);
      for (std::size_t e = removals; e < block.size(); ++e) {
        edges.emplace_back(node(a, block[e].first), node(b, block[e].second));
      }
      edges.emplace_back(node(a, hidden[a]), node(b, hidden[b]));
    }
  }

  Instance inst;
  inst.graph = Graph::from_edge_list(edges, groups * domain);
  NodeSet planted;
  for (std::size_t a = 0; a < groups; ++a) planted.push_back(node(a, hidden[a]));
  inst.planted = std::move(planted);
  inst.mc_size = groups;
  inst.meta.generator = "rb_hard";
  inst.meta.params = {{"groups", groups}, {"domain", domain}, {"hardness", hardness}};
  inst.meta.seed = seed;
  return inst;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"planted-desk", "planted_clique", {{"n", 50}, {"edge_prob", 0.2}, {"q", 8}}, 10},
      {"rb-desk", "rb_hard", {{"groups", 8}, {"domain", 6}, {"hardness", 0.8}}, 10},
      {"small-easy", "rb_hard", {{"groups", 20}, {"domain", 10}, {"hardness", 0.2}}, 1},
      {"small-medium", "rb_hard", {{"groups", 19}, {"domain", 10}, {"hardness", 0.5}}, 1},
      {"small-hard", "rb_hard", {{"groups", 18}, {"domain", 10}, {"hardness", 0.8}}, 10},
      {"large-easy", "rb_hard", {{"groups", 45}, {"domain", 30}, {"hardness", 0.2}}, 1},
      {"large-medium", "rb_hard", {{"groups", 45}, {"domain", 30}, {"hardness", 0.5}}, 1},
      {"large-hard", "rb_hard", {{"groups", 44}, {"domain", 30}, {"hardness", 0.8}}, 10},
  };
  return table;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw std::invalid_argument("unknown preset '" + name + "' (known: " + known + ")");
}

namespace {

std::string instance_name(std::size_t i) {
  std::ostringstream os;
  os << "instance_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

Instance generate_one(const std::string& generator, const json& params, std::uint64_t seed) {
  if (generator == "planted_clique") {
    return planted_clique(params.at("n").get<std::size_t>(), params.at("edge_prob").get<double>(),
                          params.at("q").get<std::size_t>(), seed);
  }
  if (generator == "rb_hard") {
    return rb_hard(params.at("groups").get<std::size_t>(), params.at("domain").get<std::size_t>(),
                   params.at("hardness").get<double>(), seed);
  }
  throw std::invalid_argument("unknown generator '" + generator + "'");
}

}  // namespace

std::vector<Instance> generate(const Preset& preset, std::size_t count, std::uint64_t seed) {
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Instance inst = generate_one(preset.generator, preset.params, seed + i);
    inst.id = instance_name(i);
    out.push_back(std::move(inst));
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DatasetError("cannot create dataset directory '" + dir + "': " + ec.message());

  json manifest;
  manifest["format"] = "scatclique-dataset";
  manifest["version"] = 1;
  manifest["info"] = dataset.info;
  manifest["instances"] = json::array();
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const Instance& inst = dataset.instances[i];
    const std::string id = inst.id.empty() ? instance_name(i) : inst.id;
    const std::string file = id + ".txt";
    std::ofstream out(fs::path(dir) / file);
    if (!out) throw DatasetError("cannot write '" + (fs::path(dir) / file).string() + "'");
    out << "# " << id << " generator=" << inst.meta.generator << " seed=" << inst.meta.seed << '\n';
    write_edge_list(out, inst.graph);

    json entry = {{"id", id}, {"file", file}};
    if (inst.planted) entry["planted"] = *inst.planted;
    if (inst.mc_size) entry["mc_size"] = *inst.mc_size;
    entry["meta"] = {{"generator", inst.meta.generator},
                     {"params", inst.meta.params},
                     {"seed", inst.meta.seed}};
    manifest["instances"].push_back(std::move(entry));
  }
  std::ofstream mout(fs::path(dir) / "manifest.json");
  if (!mout) throw DatasetError("cannot write manifest in '" + dir + "'");
  mout << manifest.dump(2) << '\n';
}

namespace {

Instance external_instance(const fs::path& file) {
  Instance inst;
  inst.id = file.stem().string();
  inst.graph = read_edge_list_file(file.string());
  inst.meta.generator = "external";
  return inst;
}

Dataset load_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DatasetError("cannot open manifest '" + manifest_path.string() + "'");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DatasetError(manifest_path.string() + ": malformed JSON: " + e.what());
  }
  const std::string where = manifest_path.string();
  if (manifest.value("format", "") != "scatclique-dataset") {
    throw DatasetError(where + ": field 'format' must be \"scatclique-dataset\"");
  }
  if (!manifest.contains("instances") || !manifest["instances"].is_array()) {
    throw DatasetError(where + ": missing array field 'instances'");
  }
  Dataset ds;
  ds.info = manifest.value("info", json::object());
  const fs::path base = manifest_path.parent_path();
  std::size_t idx = 0;
  for (const auto& entry : manifest["instances"]) {
    const std::string ctx = where + ": instances[" + std::to_string(idx) + "]";
    try {
      Instance inst;
      inst.id = entry.at("id").get<std::string>();
      inst.graph = read_edge_list_file((base / entry.at("file").get<std::string>()).string());
      if (entry.contains("planted")) {
        NodeSet planted = entry["planted"].get<NodeSet>();
        std::sort(planted.begin(), planted.end());
        inst.planted = std::move(planted);
      }
      if (entry.contains("mc_size")) inst.mc_size = entry["mc_size"].get<std::size_t>();
      if (entry.contains("meta")) {
        const auto& meta = entry["meta"];
        inst.meta.generator = meta.value("generator", "");
        inst.meta.params = meta.value("params", json::object());
        inst.meta.seed = meta.value("seed", std::uint64_t{0});
      }
      inst.validate();
      ds.instances.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw DatasetError(ctx + ": " + e.what());
    } catch (const GraphError& e) {
      throw DatasetError(ctx + ": " + e.what());
    } catch (const DatasetError& e) {
      throw DatasetError(ctx + ": " + e.what());
    }
    ++idx;
  }
  return ds;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  const fs::path p(path);
  if (fs::is_directory(p)) {
    if (fs::exists(p / "manifest.json")) return load_manifest(p / "manifest.json");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p)) {
      const auto ext = e.path().extension().string();
      if (e.is_regular_file() && (ext == ".txt" || ext == ".edges" || ext == ".el")) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    Dataset ds;
    for (const auto& f : files) ds.instances.push_back(external_instance(f));
    return ds;
  }
  if (!fs::exists(p)) throw DatasetError("dataset path '" + path + "' does not exist");
  if (p.extension() == ".json") return load_manifest(p);
  Dataset ds;
  ds.instances.push_back(external_instance(p));
  return ds;
}

}  // namespace scatclique

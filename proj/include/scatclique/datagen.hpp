#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scatclique/graph.hpp"

namespace scatclique {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstanceMeta {
  std::string generator;     // "planted_clique", "rb_hard", or "external"
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
};

struct Instance {
  std::string id;
  Graph graph;
  std::optional<NodeSet> planted;  // sorted; always a clique
  std::optional<std::size_t> mc_size;
  InstanceMeta meta;

  // Throws DatasetError when planted is not a clique or mc_size < |planted|.
  void validate() const;
};

// q uniformly chosen nodes form a clique; all other pairs appear with
// probability edge_prob.
Instance planted_clique(std::size_t n, double edge_prob, std::size_t q, std::uint64_t seed);

// RB-style forced-satisfiable instance: k groups of d nodes, each group an
// independent set. Between every two groups round(hardness * d^2) cross pairs
// are removed, never the pair joining the two hidden-assignment nodes. The
// maximum clique has exactly k nodes.
Instance rb_hard(std::size_t groups, std::size_t domain, double hardness, std::uint64_t seed);

struct Preset {
  std::string name;
  std::string generator;
  nlohmann::json params;
  std::size_t kappa;  // suggested decoder samplers
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

// Generates `count` instances; instance i uses seed + i.
std::vector<Instance> generate(const Preset& preset, std::size_t count, std::uint64_t seed);

struct Dataset {
  std::vector<Instance> instances;
  nlohmann::json info = nlohmann::json::object();  // generator, params, preset, seeds
};

// Writes manifest.json plus one edge-list file per instance into `dir`.
void save_dataset(const Dataset& dataset, const std::string& dir);

// Accepts a dataset directory (with or without manifest.json), a manifest
// file, or a single edge-list file.
Dataset load_dataset(const std::string& path);

}  // namespace scatclique

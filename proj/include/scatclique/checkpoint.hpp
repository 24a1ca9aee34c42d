#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "scatclique/model.hpp"
#include "scatclique/training.hpp"

namespace scatclique {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const TrainReport& report);

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::optional<nlohmann::json> train_report;
  std::optional<nlohmann::json> train_config;
};

// {"format", "version", "model_config", "params": [{"name", "shape", "data"}], ...}
// with row-major data.
nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace scatclique

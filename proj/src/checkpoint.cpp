#include "scatclique/checkpoint.hpp"

#include <cmath>
#include <fstream>

namespace scatclique {

using nlohmann::json;

json to_json(const ModelConfig& config) {
  json filters = json::array();
  for (const auto& f : config.filters) filters.push_back(f.name());
  return {{"input_dim", config.input_dim},
          {"hidden_dim", config.hidden_dim},
          {"layers", config.layers},
          {"mlp_depth", config.mlp_depth},
          {"filters", filters},
          {"low_pass_only", config.low_pass_only},
          {"standardize_features", config.standardize_features},
          {"seed", config.seed}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.mlp_depth = j.at("mlp_depth").get<std::size_t>();
  c.filters.clear();
  for (const auto& f : j.at("filters")) c.filters.push_back(FilterSpec::parse(f.get<std::string>()));
  c.low_pass_only = j.at("low_pass_only").get<bool>();
  c.standardize_features = j.value("standardize_features", false);
  c.seed = j.value("seed", std::uint64_t{0});
  c.validate();
  return c;
}

json to_json(const TrainConfig& config) {
  json j = {{"learning_rate", config.learning_rate},
            {"epochs", config.epochs},
            {"beta", config.loss.beta},
            {"seed", config.seed},
            {"beta1", config.beta1},
            {"beta2", config.beta2},
            {"epsilon", config.epsilon},
            {"patience", config.patience},
            {"validation_fraction", config.validation_fraction}};
  j["clip_norm"] = config.clip_norm ? json(*config.clip_norm) : json(nullptr);
  return j;
}

namespace {

// JSON has no NaN/inf; encode them as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const TrainReport& report) {
  json epochs = json::array();
  for (const auto& e : report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", number_or_null(e.train_loss)},
                      {"validation_loss", number_or_null(e.validation_loss)}});
  }
  return {{"epochs", epochs},
          {"best_epoch", report.best_epoch},
          {"best_validation_loss", number_or_null(report.best_validation_loss)},
          {"initial_validation_loss", number_or_null(report.initial_validation_loss)},
          {"skipped_steps", report.skipped_steps},
          {"train_count", report.train_count},
          {"validation_count", report.validation_count},
          {"validation_is_train", report.validation_is_train},
          {"early_stopped", report.early_stopped},
          {"diverged", report.diverged},
          {"diagnostic", report.diagnostic},
          {"wall_seconds", report.wall_seconds}};
}

json checkpoint_to_json(const Checkpoint& ckpt) {
  json params = json::array();
  for_each_named(ckpt.params, [&](const std::string& name, const Matrix& m) {
    params.push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}, {"data", m.data()}});
  });
  json j = {{"format", "scatclique-checkpoint"},
            {"version", kCheckpointVersion},
            {"model_config", to_json(ckpt.config)},
            {"params", params}};
  if (ckpt.train_config) j["train_config"] = *ckpt.train_config;
  if (ckpt.train_report) j["train_report"] = *ckpt.train_report;
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    if (j.value("format", "") != "scatclique-checkpoint") {
      throw CheckpointError("not a scatclique checkpoint (field 'format')");
    }
    const int version = j.at("version").get<int>();
    if (version > kCheckpointVersion) {
      throw CheckpointError("checkpoint version " + std::to_string(version) +
                            " is newer than supported version " +
                            std::to_string(kCheckpointVersion));
    }
    Checkpoint ckpt;
    ckpt.config = model_config_from_json(j.at("model_config"));
    ckpt.params = init_params(ckpt.config);
    const auto& arr = j.at("params");
    std::size_t i = 0;
    for_each_named(ckpt.params, [&](const std::string& name, Matrix& m) {
      if (i >= arr.size()) throw CheckpointError("missing tensor '" + name + "'");
      const auto& entry = arr[i++];
      if (entry.at("name").get<std::string>() != name) {
        throw CheckpointError("expected tensor '" + name + "', found '" +
                              entry.at("name").get<std::string>() + "'");
      }
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols()) {
        throw CheckpointError("tensor '" + name + "' has the wrong shape");
      }
      m = Matrix(shape[0], shape[1], entry.at("data").get<std::vector<double>>());
    });
    if (i != arr.size()) throw CheckpointError("unexpected extra tensors");
    if (j.contains("train_report")) ckpt.train_report = j["train_report"];
    if (j.contains("train_config")) ckpt.train_config = j["train_config"];
    return ckpt;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_json(ckpt).dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CheckpointError(path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace scatclique

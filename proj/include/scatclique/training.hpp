#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scatclique/datagen.hpp"
#include "scatclique/loss.hpp"
#include "scatclique/model.hpp"

namespace scatclique {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  LossConfig loss;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::optional<double> clip_norm;
  std::size_t patience = 20;
  double validation_fraction = 0.15;

  void validate() const;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::size_t step = 0;
  std::size_t skipped = 0;
};

// One bias-corrected adaptive-moment update. Returns false (and counts the
// skip) when any gradient entry is non-finite; parameters are then untouched.
bool adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, AdamState& state,
               const TrainConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
  double initial_validation_loss = 0.0;
  std::size_t skipped_steps = 0;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  bool validation_is_train = false;
  bool early_stopped = false;
  bool diverged = false;
  std::string diagnostic;
  double wall_seconds = 0.0;
};

struct TrainResult {
  ModelParams params;  // best-validation checkpoint
  TrainReport report;
};

// Per-graph forward + loss + reverse sweep; returns the loss and fills grads
// in flatten() order.
double loss_and_gradients(const Graph& g, const Matrix& input, const ModelParams& params,
                          const ModelConfig& mcfg, const LossConfig& lcfg,
                          std::vector<Matrix>* grads);

TrainResult train(const std::vector<Instance>& dataset, const ModelConfig& mcfg,
                  const TrainConfig& tcfg);

}  // namespace scatclique

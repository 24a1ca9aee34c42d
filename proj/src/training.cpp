#include "scatclique/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace scatclique {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (clip_norm && !(*clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be > 0");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation_fraction must lie in [0, 1)");
  }
  loss.validate();
}

bool adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, AdamState& state,
               const TrainConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: tensor count mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) params[k].require_same_shape(grads[k], "adam_step");
  for (const Matrix& g : grads) {
    for (double v : g.data()) {
      if (!std::isfinite(v)) {
        ++state.skipped;
        return false;
      }
    }
  }
  if (state.first_moment.empty()) {
    for (const Matrix& p : params) {
      state.first_moment.emplace_back(p.rows(), p.cols());
      state.second_moment.emplace_back(p.rows(), p.cols());
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(cfg.beta1, t);
  const double correct2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k].data();
    const auto& g = grads[k].data();
    auto& m = state.first_moment[k].data();
    auto& v = state.second_moment[k].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
  return true;
}

double loss_and_gradients(const Graph& g, const Matrix& input, const ModelParams& params,
                          const ModelConfig& mcfg, const LossConfig& lcfg,
                          std::vector<Matrix>* grads) {
  ad::Tape tape;
  ParamVars vars = bind(tape, params, grads != nullptr);
  ForwardResult fr = forward(tape, g, input, vars, mcfg);
  ad::Var l = loss(fr.probabilities, g, lcfg);
  const double value = l.value()(0, 0);
  if (grads) {
    tape.backward(l);
    grads->clear();
    for_each_named(vars, [&](const std::string&, const ad::Var& v) { grads->push_back(v.grad()); });
  }
  return value;
}

namespace {

void clip_global_norm(std::vector<Matrix>& grads, double max_norm) {
  double sq = 0.0;
  for (const Matrix& g : grads) {
    for (double v : g.data()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    for (Matrix& g : grads) g *= max_norm / norm;
  }
}

}  // namespace

TrainResult train(const std::vector<Instance>& dataset, const ModelConfig& mcfg,
                  const TrainConfig& tcfg) {
  const auto start = std::chrono::steady_clock::now();
  mcfg.validate();
  tcfg.validate();
  if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");

  std::vector<Matrix> inputs;
  inputs.reserve(dataset.size());
  for (const Instance& inst : dataset) inputs.push_back(prepare_input(compute_features(inst.graph), mcfg));

  std::mt19937_64 rng(tcfg.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_val = static_cast<std::size_t>(
      std::floor(tcfg.validation_fraction * static_cast<double>(dataset.size())));
  n_val = std::min(n_val, dataset.size() - 1);
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  TrainResult result;
  TrainReport& report = result.report;
  report.train_count = train_idx.size();
  report.validation_count = val_idx.size();
  if (val_idx.empty()) {
    val_idx = train_idx;
    report.validation_is_train = true;
  }

  ModelParams params = init_params(mcfg);
  auto mean_loss = [&](const ModelParams& at, const std::vector<std::size_t>& idx) {
    double total = 0.0;
    for (std::size_t i : idx) {
      total += loss_and_gradients(dataset[i].graph, inputs[i], at, mcfg, tcfg.loss, nullptr);
    }
    return total / static_cast<double>(idx.size());
  };

  const double initial_val = mean_loss(params, val_idx);
  report.epochs.push_back({0, mean_loss(params, train_idx), initial_val});
  report.initial_validation_loss = initial_val;
  report.best_validation_loss = initial_val;
  report.best_epoch = 0;
  result.params = params;
  if (!std::isfinite(initial_val)) {
    report.diverged = true;
    report.diagnostic = "non-finite validation loss at initialization";
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

  AdamState adam;
  std::vector<Matrix> flat = flatten(params);
  std::vector<Matrix> grads;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t i : train_idx) {
      const double l = loss_and_gradients(dataset[i].graph, inputs[i], params, mcfg, tcfg.loss, &grads);
      if (!std::isfinite(l)) {
        report.diverged = true;
        report.diagnostic = "non-finite training loss at epoch " + std::to_string(epoch) +
                            " on instance " + dataset[i].id;
        break;
      }
      epoch_loss += l;
      if (tcfg.clip_norm) clip_global_norm(grads, *tcfg.clip_norm);
      if (adam_step(flat, grads, adam, tcfg)) assign(params, flat);
    }
    if (report.diverged) break;

    const double val = mean_loss(params, val_idx);
    report.epochs.push_back({epoch, epoch_loss / static_cast<double>(train_idx.size()), val});
    if (!std::isfinite(val)) {
      report.diverged = true;
      report.diagnostic = "non-finite validation loss at epoch " + std::to_string(epoch);
      break;
    }
    if (val < report.best_validation_loss) {
      report.best_validation_loss = val;
      report.best_epoch = epoch;
      result.params = params;
      stale = 0;
    } else if (tcfg.patience > 0 && ++stale >= tcfg.patience) {
      report.early_stopped = true;
      break;
    }
  }
  report.skipped_steps = adam.skipped;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace scatclique

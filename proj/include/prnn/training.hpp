#pragma once

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <vector>

#include "prnn/adam.hpp"
#include "prnn/bptt.hpp"
#include "prnn/metrics.hpp"

namespace prnn {

struct TrainConfig {
  double learning_rate = 1.0e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1.0e-8;
  int max_epochs = 400;
  int batch_size = 8;       // paths per update
  double fd_step = 1.0e-7;  // material sensitivity step
  int patience = 50;        // epochs without validation improvement
  std::uint64_t rng_seed = 0;
  int n_threads = 0;        // 0 = hardware concurrency

  void validate() const {
    AdamConfig{learning_rate, beta1, beta2, adam_eps}.validate();
    if (max_epochs < 1) throw ConfigError("TrainConfig: max_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (!(fd_step > 0.0)) throw ConfigError("TrainConfig: fd_step must be > 0");
    if (patience < 1) throw ConfigError("TrainConfig: patience must be >= 1");
  }

  AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_eps}; }
};

struct EpochLog {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double wall_time_s = 0.0;
};

struct TrainResult {
  PrnnModel model;          // best-on-validation weights
  AdamState opt_state;      // optimizer state at the best epoch
  std::vector<EpochLog> log;
  double best_val_mse = 0.0;
  int best_epoch = -1;
  int epochs_run = 0;
  bool diverged = false;    // loss went non-finite; `model` is the last good one
};

// Epoch loop with shuffled path batches and best-on-validation retention.
// Fully reproducible from config.rng_seed: shuffling, batching and the
// fixed-order gradient reduction are all deterministic.
inline TrainResult train(const PrnnModel& init_model, const std::vector<DatasetPath>& train_set,
                         const std::vector<DatasetPath>& val_set, const TrainConfig& cfg) {
  cfg.validate();
  init_model.params.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  TrainResult res;
  res.model = init_model;
  PrnnModel current = init_model;
  Eigen::VectorXd flat = current.params.flatten();
  AdamState opt(flat.size());
  const AdamConfig adam_cfg = cfg.adam();

  std::vector<const DatasetPath*> val_view;
  val_view.reserve(val_set.size());
  for (const auto& p : val_set) val_view.push_back(&p);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::mt19937_64 rng(derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    bool nan_hit = false;
    for (std::size_t at = 0; at < order.size() && !nan_hit; at += cfg.batch_size) {
      std::vector<const DatasetPath*> batch;
      for (std::size_t i = at; i < std::min(order.size(), at + cfg.batch_size); ++i)
        batch.push_back(&train_set[order[i]]);
      double batch_loss = 0.0;
      Gradients grads;
      try {
        grads = grads_bptt(current, batch, cfg.fd_step, cfg.n_threads, &batch_loss);
      } catch (const NumericsError&) {
        nan_hit = true;
        break;
      } catch (const std::invalid_argument&) {
        // exploded weights drive non-finite local inputs into the material layer
        nan_hit = true;
        break;
      }
      const Eigen::VectorXd g = grads.flatten();
      if (!g.allFinite() || !std::isfinite(batch_loss)) {
        nan_hit = true;
        break;
      }
      std::size_t batch_steps = 0;
      for (const auto* b : batch) batch_steps += b->path.steps.size();
      epoch_loss += batch_loss * double(batch_steps);
      epoch_steps += batch_steps;
      adam_step(flat, g, opt, adam_cfg);
      current.params.unflatten(flat);
    }

    if (nan_hit) {
      res.diverged = true;
      res.epochs_run = epoch;
      return res;
    }

    const double train_mse = epoch_steps ? epoch_loss / double(epoch_steps) : 0.0;
    double val_mse;
    try {
      val_mse = loss_mse(current, val_view, cfg.n_threads);
    } catch (const NumericsError&) {
      val_mse = std::numeric_limits<double>::quiet_NaN();
    } catch (const std::invalid_argument&) {
      val_mse = std::numeric_limits<double>::quiet_NaN();
    }
    res.log.push_back({epoch, train_mse, val_mse, elapsed()});

    if (!std::isfinite(val_mse)) {
      res.diverged = true;
      res.epochs_run = epoch + 1;
      return res;
    }

    if (val_mse < best) {
      best = val_mse;
      res.model = current;
      res.opt_state = opt;
      res.best_val_mse = best;
      res.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      res.epochs_run = epoch + 1;
      return res;
    }
  }
  res.epochs_run = cfg.max_epochs;
  return res;
}

}  // namespace prnn

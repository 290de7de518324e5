#pragma once

#include <cmath>

#include <Eigen/Core>

#include "prnn/util.hpp"

namespace prnn {

struct AdamConfig {
  double learning_rate = 1.0e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1.0e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("AdamConfig: learning_rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
      throw ConfigError("AdamConfig: betas must be in (0, 1)");
    if (!(eps > 0.0)) throw ConfigError("AdamConfig: eps must be > 0");
  }
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step_count = 0;

  explicit AdamState(Eigen::Index n = 0)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

// Textbook Adam with bias correction; deterministic given state.
inline void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
                      AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size())
    throw std::invalid_argument("adam_step: size mismatch");
  state.step_count += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseProduct(grads);
  const double mc = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
  const double vc = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_count));
  params -= cfg.learning_rate *
            ((state.m / mc).array() / ((state.v / vc).array().sqrt() + cfg.eps)).matrix();
}

}  // namespace prnn

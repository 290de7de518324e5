#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "prnn/material.hpp"

namespace prnn {

struct CzmResult {
  Eigen::Vector2d traction;
  CohesiveState state;
};

namespace detail {

// Mode-interaction thresholds at mixity B = ds^2 / (<dn>+^2 + ds^2),
// interpolated between the pure-mode onset and propagation jumps with
// exponent eta (B-K form).
struct CzmThresholds {
  double onset;   // effective jump at damage onset
  double final_;  // effective jump at full decohesion
};

inline CzmThresholds czm_thresholds(double mixity, const CzmProps& props) {
  const double bpow = props.eta == 1.0 ? mixity : std::pow(mixity, props.eta);
  const double on_n = props.onset_jump_normal();
  const double on_s = props.onset_jump_shear();
  const double onset = std::sqrt(on_n * on_n + (on_s * on_s - on_n * on_n) * bpow);
  const double gc = props.g_ic + (props.g_iic - props.g_ic) * bpow;
  const double final_ = 2.0 * gc / (props.penalty_stiffness * onset);
  return {onset, final_};
}

}  // namespace detail

// Bilinear mixed-mode cohesive update. Traction is secant through the origin
// with stiffness (1-D)K on the tensile-normal and shear parts; a compressive
// normal jump carries the full penalty stiffness and grows no damage.
// The exposed damage d is the energy-ratio variable, (lmax-do)/(df-do) for a
// bilinear law, and is enforced non-decreasing together with lmax.
inline CzmResult czm_update(const Eigen::Vector2d& jump, const CohesiveState& state,
                            const CzmProps& props) {
  if (!jump.allFinite()) throw std::invalid_argument("czm_update: non-finite jump");

  const double k = props.penalty_stiffness;
  const double dn_pos = std::max(jump[0], 0.0);
  const double dn_neg = std::min(jump[0], 0.0);
  const double ds = jump[1];

  const double sq = dn_pos * dn_pos + ds * ds;
  const double lambda = std::sqrt(sq);
  const double mixity = sq > 0.0 ? (ds * ds) / sq : 0.0;
  const auto thr = detail::czm_thresholds(mixity, props);
  if (!(thr.final_ > thr.onset))
    throw NumericsError("czm_update: degenerate mixed-mode thresholds");

  CohesiveState next;
  next.max_effective_jump = std::max(state.max_effective_jump, lambda);
  const double ratio =
      std::clamp((next.max_effective_jump - thr.onset) / (thr.final_ - thr.onset), 0.0, 1.0);
  next.damage = std::max(state.damage, ratio);

  double degradation = 0.0;
  if (next.max_effective_jump >= thr.final_) {
    degradation = 1.0;
  } else if (next.max_effective_jump > thr.onset) {
    degradation = thr.final_ * (next.max_effective_jump - thr.onset) /
                  (next.max_effective_jump * (thr.final_ - thr.onset));
  }

  Eigen::Vector2d traction;
  traction[0] = (1.0 - degradation) * k * dn_pos + k * dn_neg;
  traction[1] = (1.0 - degradation) * k * ds;
  return {traction, next};
}

// Distance (in jump units, mm) to the nearest non-smooth point of the law:
// contact switch, loading/unloading switch, damage onset, full decohesion.
inline double czm_branch_distance(const Eigen::Vector2d& jump, const CohesiveState& state,
                                  const CzmProps& props) {
  const double dn_pos = std::max(jump[0], 0.0);
  const double lambda = std::hypot(dn_pos, jump[1]);
  const double sq = dn_pos * dn_pos + jump[1] * jump[1];
  const double mixity = sq > 0.0 ? (jump[1] * jump[1]) / sq : 0.0;
  const auto thr = detail::czm_thresholds(mixity, props);
  const double lmax = std::max(state.max_effective_jump, lambda);

  double dist = std::abs(jump[0]);
  dist = std::min(dist, std::abs(lambda - state.max_effective_jump));
  dist = std::min(dist, std::abs(lmax - thr.onset));
  dist = std::min(dist, std::abs(lmax - thr.final_));
  // Tie in the monotone-damage max(); only a live branch while softening.
  const double ratio = (lmax - thr.onset) / (thr.final_ - thr.onset);
  if (ratio > 0.0 && ratio < 1.0)
    dist = std::min(dist, std::abs(state.damage - ratio) * (thr.final_ - thr.onset));
  return dist;
}

}  // namespace prnn

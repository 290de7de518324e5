#pragma once

#include <Eigen/Core>

#include "prnn/cohesive.hpp"
#include "prnn/j2_plasticity.hpp"

namespace prnn {

// Relative step for all finite-difference tangents and material sensitivities;
// the actual step per component is h_rel * (1 + |x|).
inline constexpr double kDefaultFdStep = 1.0e-7;

// Central-difference Jacobian d(output)/d(input) of a vector map. Internal
// state must be frozen at the beginning-of-step value inside `f` by the
// caller, mirroring how gradients are taken through material cells.
template <class F>
Eigen::MatrixXd fd_tangent(F&& f, const Eigen::VectorXd& input, double h_rel = kDefaultFdStep) {
  if (!(h_rel > 0.0)) throw std::invalid_argument("fd_tangent: step must be > 0");
  Eigen::VectorXd x = input;
  const Eigen::VectorXd y0 = f(x);
  Eigen::MatrixXd jac(y0.size(), input.size());
  for (Eigen::Index j = 0; j < input.size(); ++j) {
    const double h = h_rel * (1.0 + std::abs(input[j]));
    x[j] = input[j] + h;
    const Eigen::VectorXd yp = f(x);
    x[j] = input[j] - h;
    const Eigen::VectorXd ym = f(x);
    x[j] = input[j];
    jac.col(j) = (yp - ym) / (2.0 * h);
  }
  return jac;
}

inline Eigen::Matrix3d fd_strain_tangent(const Eigen::Vector3d& strain, const BulkState& state,
                                         const BulkProps& props, double h_rel = kDefaultFdStep) {
  auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return j2_update(Eigen::Vector3d(x), state, props).stress;
  };
  return fd_tangent(f, strain, h_rel);
}

inline Eigen::Matrix2d fd_jump_tangent(const Eigen::Vector2d& jump, const CohesiveState& state,
                                       const CzmProps& props, double h_rel = kDefaultFdStep) {
  auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return czm_update(Eigen::Vector2d(x), state, props).traction;
  };
  return fd_tangent(f, jump, h_rel);
}

// Full sensitivity blocks of one material cell, (input, state_in) -> (output,
// state_out), by central differences with state restore. These are the
// recurrent-cell Jacobians consumed by backpropagation through time.

struct J2Jacobians {
  Eigen::Matrix3d dstress_dstrain;
  Eigen::Matrix<double, 3, 4> dstress_dstate;
  Eigen::Matrix<double, 4, 3> dstate_dstrain;
  Eigen::Matrix4d dstate_dstate;
};

namespace detail {

inline Eigen::Vector4d pack(const BulkState& s) {
  return {s.plastic_strain[0], s.plastic_strain[1], s.plastic_strain[2], s.eq_plastic_strain};
}

inline BulkState unpack_bulk(const Eigen::Vector4d& v) {
  BulkState s;
  s.plastic_strain = v.head<3>();
  s.eq_plastic_strain = v[3];
  return s;
}

inline Eigen::Vector2d pack(const CohesiveState& s) { return {s.damage, s.max_effective_jump}; }

inline CohesiveState unpack_coh(const Eigen::Vector2d& v) { return {v[0], v[1]}; }

}  // namespace detail

inline J2Jacobians j2_fd_jacobians(const Eigen::Vector3d& strain, const BulkState& state,
                                   const BulkProps& props, double h_rel = kDefaultFdStep) {
  J2Jacobians jac;
  Eigen::Vector3d eps = strain;
  for (int j = 0; j < 3; ++j) {
    const double h = h_rel * (1.0 + std::abs(strain[j]));
    eps[j] = strain[j] + h;
    const J2Result rp = j2_update(eps, state, props);
    eps[j] = strain[j] - h;
    const J2Result rm = j2_update(eps, state, props);
    eps[j] = strain[j];
    jac.dstress_dstrain.col(j) = (rp.stress - rm.stress) / (2.0 * h);
    jac.dstate_dstrain.col(j) = (detail::pack(rp.state) - detail::pack(rm.state)) / (2.0 * h);
  }
  const Eigen::Vector4d s0 = detail::pack(state);
  Eigen::Vector4d s = s0;
  for (int j = 0; j < 4; ++j) {
    const double h = h_rel * (1.0 + std::abs(s0[j]));
    s[j] = s0[j] + h;
    const J2Result rp = j2_update(strain, detail::unpack_bulk(s), props);
    s[j] = s0[j] - h;
    const J2Result rm = j2_update(strain, detail::unpack_bulk(s), props);
    s[j] = s0[j];
    jac.dstress_dstate.col(j) = (rp.stress - rm.stress) / (2.0 * h);
    jac.dstate_dstate.col(j) = (detail::pack(rp.state) - detail::pack(rm.state)) / (2.0 * h);
  }
  return jac;
}

struct CzmJacobians {
  Eigen::Matrix2d dtraction_djump;
  Eigen::Matrix2d dtraction_dstate;
  Eigen::Matrix2d dstate_djump;
  Eigen::Matrix2d dstate_dstate;
};

inline CzmJacobians czm_fd_jacobians(const Eigen::Vector2d& jump, const CohesiveState& state,
                                     const CzmProps& props, double h_rel = kDefaultFdStep) {
  CzmJacobians jac;
  Eigen::Vector2d d = jump;
  for (int j = 0; j < 2; ++j) {
    const double h = h_rel * (1.0 + std::abs(jump[j]));
    d[j] = jump[j] + h;
    const CzmResult rp = czm_update(d, state, props);
    d[j] = jump[j] - h;
    const CzmResult rm = czm_update(d, state, props);
    d[j] = jump[j];
    jac.dtraction_djump.col(j) = (rp.traction - rm.traction) / (2.0 * h);
    jac.dstate_djump.col(j) = (detail::pack(rp.state) - detail::pack(rm.state)) / (2.0 * h);
  }
  const Eigen::Vector2d s0 = detail::pack(state);
  Eigen::Vector2d s = s0;
  for (int j = 0; j < 2; ++j) {
    const double h = h_rel * (1.0 + std::abs(s0[j]));
    s[j] = s0[j] + h;
    const CzmResult rp = czm_update(jump, detail::unpack_coh(s), props);
    s[j] = s0[j] - h;
    const CzmResult rm = czm_update(jump, detail::unpack_coh(s), props);
    s[j] = s0[j];
    jac.dtraction_dstate.col(j) = (rp.traction - rm.traction) / (2.0 * h);
    jac.dstate_dstate.col(j) = (detail::pack(rp.state) - detail::pack(rm.state)) / (2.0 * h);
  }
  return jac;
}

}  // namespace prnn

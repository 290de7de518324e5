#pragma once

#include <cmath>

#include <Eigen/Core>

#include "prnn/elastic.hpp"
#include "prnn/material.hpp"

namespace prnn {

// Von Mises equivalent stress in plane stress,
//   sig_eq^2 = sxx^2 - sxx*syy + syy^2 + 3*sxy^2 = a^2/4 + (3/4) b^2 + 3 c^2
// with a = sxx + syy, b = sxx - syy, c = sxy.
inline double vonmises_plane_stress(const Eigen::Vector3d& stress) {
  const double a = stress[0] + stress[1];
  const double b = stress[0] - stress[1];
  const double c = stress[2];
  return std::sqrt(0.25 * a * a + 0.75 * b * b + 3.0 * c * c);
}

inline double j2_yield_function(const Eigen::Vector3d& stress, double eq_plastic_strain,
                                const BulkProps& props) {
  return vonmises_plane_stress(stress) -
         (props.yield_stress + props.hardening_modulus * eq_plastic_strain);
}

struct J2Result {
  Eigen::Vector3d stress;
  BulkState state;
};

namespace detail {

// delta_gamma parametrizes the plastic flow increment d(eps_p) = dgamma * P * sigma.
// In the modal basis (a, b, c) the return map scales each component by
// 1/(1 + c_i dgamma), with c1 = E/(2(1-nu)) and c2 = 3G for both b and c.
struct J2ModalTrial {
  double a, b, c;     // trial modal components
  double qa, qb;      // qa = a^2/4, qb = (3/4) b^2 + 3 c^2
  double c1, c2;      // modal scaling factors of C*P
};

inline J2ModalTrial j2_modal_trial(const Eigen::Vector3d& trial, const BulkProps& props) {
  J2ModalTrial m;
  m.a = trial[0] + trial[1];
  m.b = trial[0] - trial[1];
  m.c = trial[2];
  m.qa = 0.25 * m.a * m.a;
  m.qb = 0.75 * m.b * m.b + 3.0 * m.c * m.c;
  m.c1 = props.youngs_modulus / (2.0 * (1.0 - props.poisson_ratio));
  m.c2 = 3.0 * props.shear_modulus();
  return m;
}

inline double j2_eq_sq(const J2ModalTrial& m, double dg) {
  const double da = 1.0 + m.c1 * dg;
  const double db = 1.0 + m.c2 * dg;
  return m.qa / (da * da) + m.qb / (db * db);
}

inline double j2_eq_sq_deriv(const J2ModalTrial& m, double dg) {
  const double da = 1.0 + m.c1 * dg;
  const double db = 1.0 + m.c2 * dg;
  return -2.0 * m.c1 * m.qa / (da * da * da) - 2.0 * m.c2 * m.qb / (db * db * db);
}

}  // namespace detail

// Elastic-predictor / return-mapping update for plane-stress J2 plasticity with
// linear isotropic hardening. The consistency condition reduces to a scalar
// equation in the plastic multiplier, solved by a bracketed Newton iteration.
inline J2Result j2_update(const Eigen::Vector3d& strain, const BulkState& state,
                          const BulkProps& props) {
  if (!strain.allFinite()) throw std::invalid_argument("j2_update: non-finite strain");

  const Eigen::Matrix3d c = plane_stress_stiffness(props);
  const Eigen::Vector3d trial = c * (strain - state.plastic_strain);
  const double hard = props.hardening_modulus;
  const double flow_stress = props.yield_stress + hard * state.eq_plastic_strain;
  const double f_trial = vonmises_plane_stress(trial) - flow_stress;

  if (f_trial <= 0.0) return {trial, state};

  const auto m = detail::j2_modal_trial(trial, props);
  const double tol = 1.0e-12 * (flow_stress + f_trial);
  const int max_iter = 50;

  auto residual = [&](double dg) {
    const double eq = std::sqrt(detail::j2_eq_sq(m, dg));
    return eq * (1.0 - hard * dg) - flow_stress;
  };

  // Bracket the root; residual is strictly decreasing from f_trial > 0.
  double lo = 0.0, hi = 1.0 / std::max(m.c1, m.c2);
  while (residual(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!(hi < 1.0e30)) throw NumericsError("j2_update: failed to bracket plastic multiplier");
  }

  double dg = 0.5 * (lo + hi);
  double r = residual(dg);
  int it = 0;
  for (; it < max_iter && std::abs(r) > tol; ++it) {
    const double eq = std::sqrt(detail::j2_eq_sq(m, dg));
    const double deq = detail::j2_eq_sq_deriv(m, dg) / (2.0 * eq);
    const double dr = deq * (1.0 - hard * dg) - hard * eq;
    double next = dg - r / dr;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    dg = next;
    r = residual(dg);
    (r > 0.0 ? lo : hi) = dg;
  }
  if (std::abs(r) > tol)
    throw NumericsError("j2_update: return mapping did not converge, residual " +
                        std::to_string(r));

  const double da = 1.0 + m.c1 * dg;
  const double db = 1.0 + m.c2 * dg;
  const double a = m.a / da;
  const double b = m.b / db;
  const double sxy = m.c / db;

  Eigen::Vector3d stress(0.5 * (a + b), 0.5 * (a - b), sxy);
  const double eq = vonmises_plane_stress(stress);

  J2Result out;
  out.stress = stress;
  // Flow direction P*sigma in engineering components (factor 3 on the shear).
  out.state.plastic_strain =
      state.plastic_strain +
      dg * Eigen::Vector3d(stress[0] - 0.5 * stress[1], stress[1] - 0.5 * stress[0],
                           3.0 * stress[2]);
  out.state.eq_plastic_strain = state.eq_plastic_strain + dg * eq;
  return out;
}

// Signed distance (in strain-like units) from the trial state to the
// elastic/plastic branch switch; used by gradient checks to reject samples
// near the non-smooth point.
inline double j2_branch_distance(const Eigen::Vector3d& strain, const BulkState& state,
                                 const BulkProps& props) {
  const Eigen::Matrix3d c = plane_stress_stiffness(props);
  const Eigen::Vector3d trial = c * (strain - state.plastic_strain);
  const double f_trial = vonmises_plane_stress(trial) -
                         (props.yield_stress + props.hardening_modulus * state.eq_plastic_strain);
  return std::abs(f_trial) / (3.0 * props.shear_modulus() + props.hardening_modulus);
}

}  // namespace prnn

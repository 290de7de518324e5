#pragma once

#include <Eigen/Core>

#include "prnn/material.hpp"

namespace prnn {

// Plane-stress elastic stiffness in engineering (exx, eyy, gxy) convention.
inline Eigen::Matrix3d plane_stress_stiffness(const BulkProps& props) {
  const double e = props.youngs_modulus;
  const double nu = props.poisson_ratio;
  const double f = e / (1.0 - nu * nu);
  Eigen::Matrix3d c;
  c << f, f * nu, 0.0,  //
      f * nu, f, 0.0,   //
      0.0, 0.0, f * (1.0 - nu) / 2.0;
  return c;
}

inline Eigen::Vector3d elastic_update(const Eigen::Vector3d& strain, const BulkProps& props) {
  if (!strain.allFinite()) throw std::invalid_argument("elastic_update: non-finite strain");
  return plane_stress_stiffness(props) * strain;
}

}  // namespace prnn

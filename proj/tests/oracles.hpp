#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "prnn/j2_plasticity.hpp"
#include "prnn/material.hpp"

namespace oracle {

// Dense mat-vec by plain index loops.
inline Eigen::VectorXd matvec(const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

// Plane-stress elastic stiffness assembled from first principles.
inline Eigen::Matrix3d plane_stress_c(double e, double nu) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  const double f = e / (1.0 - nu * nu);
  c(0, 0) = c(1, 1) = f;
  c(0, 1) = c(1, 0) = f * nu;
  c(2, 2) = f * (1.0 - nu) / 2.0;
  return c;
}

inline double softplus_ref(double x) { return std::log(1.0 + std::exp(x)); }

// Integrate a strain increment through j2_update in n_sub substeps; with a
// 100x finer discretization this serves as the reference for one coarse step.
inline prnn::J2Result substepped_j2(const Eigen::Vector3d& strain_from,
                                    const Eigen::Vector3d& strain_to, const prnn::BulkState& state,
                                    const prnn::BulkProps& props, int n_sub) {
  prnn::J2Result r;
  r.state = state;
  r.stress.setZero();
  for (int k = 1; k <= n_sub; ++k) {
    const double a = static_cast<double>(k) / n_sub;
    r = prnn::j2_update(strain_from + a * (strain_to - strain_from), r.state, props);
  }
  return r;
}

}  // namespace oracle

#include "prnn/bptt.hpp"
#include "prnn/metrics.hpp"

namespace oracle {

// Global central finite difference of the batch loss over every weight; the
// reference that backpropagation-through-time is checked against.
inline Eigen::VectorXd global_fd_loss_grad(const prnn::PrnnModel& model,
                                           const std::vector<const prnn::DatasetPath*>& batch,
                                           double h_rel = 1e-6) {
  auto loss_of = [&](const Eigen::VectorXd& flat) {
    prnn::PrnnModel m = model;
    m.params.unflatten(flat);
    return prnn::loss_mse(m, batch, 1);
  };
  const Eigen::VectorXd x0 = model.params.flatten();
  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = h_rel * (1.0 + std::abs(x0[i]));
    x[i] = x0[i] + h;
    const double lp = loss_of(x);
    x[i] = x0[i] - h;
    const double lm = loss_of(x);
    x[i] = x0[i];
    g[i] = (lp - lm) / (2.0 * h);
  }
  return g;
}

// Largest relative component disagreement between two gradients. Components
// below the oracle's own noise floor cannot be measured and are skipped.
inline double max_rel_gradient_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double floor = 1e-6 * std::max(1e-30, b.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max(std::abs(a[i]), std::abs(b[i]));
    if (denom <= floor) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace oracle

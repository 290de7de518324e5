#pragma once

#include <Eigen/Core>

#include "prnn/config.hpp"
#include "prnn/util.hpp"

namespace prnn {

// Plane-stress elastoplastic bulk. Units: MPa for moduli and stresses.
struct BulkProps {
  double youngs_modulus = 3130.0;
  double poisson_ratio = 0.37;
  double yield_stress = 64.8;
  double hardening_modulus = 100.0;

  void validate() const {
    if (!(youngs_modulus > 0.0)) throw ConfigError("BulkProps: youngs_modulus must be > 0");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
      throw ConfigError("BulkProps: poisson_ratio must be in [0, 0.5)");
    if (!(yield_stress > 0.0)) throw ConfigError("BulkProps: yield_stress must be > 0");
    if (!(hardening_modulus >= 0.0)) throw ConfigError("BulkProps: hardening_modulus must be >= 0");
  }

  double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }

  static BulkProps from_config(const Config& cfg) {
    BulkProps p;
    p.youngs_modulus = cfg.get_double("material.youngs_modulus", p.youngs_modulus);
    p.poisson_ratio = cfg.get_double("material.poisson_ratio", p.poisson_ratio);
    p.yield_stress = cfg.get_double("material.yield_stress", p.yield_stress);
    p.hardening_modulus = cfg.get_double("material.hardening_modulus", p.hardening_modulus);
    p.validate();
    return p;
  }
};

// Bilinear cohesive law. Strengths in MPa, energies in N/mm, K in N/mm^3.
struct CzmProps {
  double normal_strength = 60.0;
  double shear_strength = 60.0;
  double g_ic = 0.874;
  double g_iic = 1.717;
  double eta = 1.0;
  double penalty_stiffness = 5.0e7;

  void validate() const {
    if (!(normal_strength > 0.0 && shear_strength > 0.0 && g_ic > 0.0 && g_iic > 0.0 &&
          eta > 0.0 && penalty_stiffness > 0.0))
      throw ConfigError("CzmProps: all parameters must be > 0");
    // Onset jump must precede the final jump in each pure mode, i.e. tau^2 < 2 G K.
    if (!(normal_strength * normal_strength < 2.0 * g_ic * penalty_stiffness))
      throw ConfigError("CzmProps: mode I onset jump is not below the final jump");
    if (!(shear_strength * shear_strength < 2.0 * g_iic * penalty_stiffness))
      throw ConfigError("CzmProps: mode II onset jump is not below the final jump");
  }

  double onset_jump_normal() const { return normal_strength / penalty_stiffness; }
  double onset_jump_shear() const { return shear_strength / penalty_stiffness; }
  double final_jump_normal() const { return 2.0 * g_ic / normal_strength; }
  double final_jump_shear() const { return 2.0 * g_iic / shear_strength; }

  static CzmProps from_config(const Config& cfg) {
    CzmProps p;
    p.normal_strength = cfg.get_double("czm.normal_strength", p.normal_strength);
    p.shear_strength = cfg.get_double("czm.shear_strength", p.shear_strength);
    p.g_ic = cfg.get_double("czm.g_ic", p.g_ic);
    p.g_iic = cfg.get_double("czm.g_iic", p.g_iic);
    p.eta = cfg.get_double("czm.eta", p.eta);
    p.penalty_stiffness = cfg.get_double("czm.penalty_stiffness", p.penalty_stiffness);
    p.validate();
    return p;
  }
};

// Internal variables of one bulk point. plastic_strain uses engineering
// components (exx, eyy, gxy); eq_plastic_strain is monotone along any history.
struct BulkState {
  Eigen::Vector3d plastic_strain = Eigen::Vector3d::Zero();
  double eq_plastic_strain = 0.0;
};

// Internal variables of one cohesive point. damage is the energy-ratio
// variable in [0,1]; max_effective_jump is the damage threshold in mm.
// Both are monotone non-decreasing along any jump history.
struct CohesiveState {
  double damage = 0.0;
  double max_effective_jump = 0.0;
};

struct StressStrainPair {
  Eigen::Vector3d strain = Eigen::Vector3d::Zero();
  Eigen::Vector3d stress = Eigen::Vector3d::Zero();
};

}  // namespace prnn

#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "prnn/cohesive.hpp"
#include "prnn/dataset.hpp"
#include "prnn/gp_sampler.hpp"
#include "prnn/j2_plasticity.hpp"
#include "prnn/material.hpp"
#include "prnn/util.hpp"

namespace prnn {

// Desk-scale stand-in for a full-order micromodel: a fixed aggregate of bulk
// and cohesive material points with frozen localization maps, evaluated
// exactly. Its volume-weighted bulk-stress average is the ground truth that
// all training and test data are generated from.
struct TeacherConfig {
  int n_bulk = 64;
  int n_cohesive = 16;  // keeps the 4:1 bulk-to-cohesive ratio at defaults
  std::uint64_t rng_seed = 0;
  // gains scale the randomly drawn localization/coupling maps; the defaults
  // were calibrated so that standard GP paths drive a nontrivial fraction of
  // cohesive points past damage onset (see the build-time probe below)
  double bulk_gain = 0.6;
  double coh_gain = 0.35;
  double damage_gain = 1.5;
  BulkProps bulk_props;
  CzmProps czm_props;

  void validate() const {
    if (n_bulk < 1) throw ConfigError("TeacherConfig: n_bulk must be >= 1");
    if (n_cohesive < 0) throw ConfigError("TeacherConfig: n_cohesive must be >= 0");
    if (!(bulk_gain > 0.0 && coh_gain >= 0.0 && damage_gain >= 0.0))
      throw ConfigError("TeacherConfig: gains must be positive");
    bulk_props.validate();
    czm_props.validate();
  }
};

struct Teacher {
  TeacherConfig config;
  Eigen::VectorXd volume_weights;  // (B), positive, sums to 1
  Eigen::MatrixXd loc_bulk;        // (3B x 3) macro strain -> bulk local strain
  Eigen::MatrixXd loc_coh;         // (2C x 3) macro strain -> jumps (mm)
  Eigen::MatrixXd coupling;        // (3B x C) damage -> amplifier argument
  std::string hash;                // deterministic digest of config + matrices
  std::string build_log;           // calibration probe summary
};

struct TeacherResponse {
  std::vector<Eigen::Vector3d> stresses;
  std::vector<Eigen::VectorXd> damage;  // end-of-step damage per cohesive point
};

// Per step: localize -> cohesive update (producing damage) -> damage-amplified
// bulk localization -> bulk update -> volume-weighted average of bulk
// stresses. Cohesive tractions never enter the average.
inline TeacherResponse teacher_respond(const Teacher& teacher, const StrainPath& path) {
  const int nb = teacher.config.n_bulk;
  const int nc = teacher.config.n_cohesive;
  std::vector<BulkState> bulk(nb);
  std::vector<CohesiveState> coh(nc);

  TeacherResponse out;
  out.stresses.reserve(path.steps.size());
  out.damage.reserve(path.steps.size());

  Eigen::VectorXd d(nc);
  for (const auto& eps : path.steps) {
    const Eigen::VectorXd jumps = teacher.loc_coh * eps;
    for (int k = 0; k < nc; ++k) {
      const CzmResult r = czm_update(jumps.segment<2>(2 * k), coh[k], teacher.config.czm_props);
      coh[k] = r.state;
      d[k] = r.state.damage;
    }
    Eigen::VectorXd arg = Eigen::VectorXd::Ones(3 * nb);
    if (nc > 0) arg.noalias() += teacher.coupling * d;
    const Eigen::VectorXd local =
        arg.unaryExpr([](double x) { return softplus(x); })
            .cwiseProduct(teacher.loc_bulk * eps);

    Eigen::Vector3d sigma = Eigen::Vector3d::Zero();
    for (int i = 0; i < nb; ++i) {
      const J2Result r = j2_update(local.segment<3>(3 * i), bulk[i], teacher.config.bulk_props);
      bulk[i] = r.state;
      sigma += teacher.volume_weights[i] * r.stress;
    }
    out.stresses.push_back(sigma);
    out.damage.push_back(d);
  }
  return out;
}

inline Teacher teacher_build(const TeacherConfig& cfg) {
  cfg.validate();
  Teacher t;
  t.config = cfg;

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> neg(-1.0, 0.0);

  t.volume_weights.resize(cfg.n_bulk);
  for (int i = 0; i < cfg.n_bulk; ++i) t.volume_weights[i] = unit(rng);
  t.volume_weights /= t.volume_weights.sum();

  // identity plus fluctuation: localization tensors of a real aggregate
  // average to the identity, which keeps the homogenized signal coherent
  t.loc_bulk.resize(3 * cfg.n_bulk, 3);
  for (int i = 0; i < cfg.n_bulk; ++i)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        t.loc_bulk(3 * i + r, c) = (r == c ? 1.0 : 0.0) + cfg.bulk_gain * sym(rng);

  t.loc_coh.resize(2 * cfg.n_cohesive, 3);
  for (Eigen::Index r = 0; r < t.loc_coh.rows(); ++r)
    for (int c = 0; c < 3; ++c) t.loc_coh(r, c) = cfg.coh_gain * sym(rng);

  // damage softens: the amplifier argument decreases from 1 as damage grows
  t.coupling.resize(3 * cfg.n_bulk, cfg.n_cohesive);
  for (Eigen::Index r = 0; r < t.coupling.rows(); ++r)
    for (int c = 0; c < cfg.n_cohesive; ++c) t.coupling(r, c) = cfg.damage_gain * neg(rng);

  // digest
  std::string blob;
  blob += std::to_string(cfg.n_bulk) + "," + std::to_string(cfg.n_cohesive) + "," +
          std::to_string(cfg.rng_seed) + ",";
  for (double g : {cfg.bulk_gain, cfg.coh_gain, cfg.damage_gain, cfg.bulk_props.youngs_modulus,
                   cfg.bulk_props.poisson_ratio, cfg.bulk_props.yield_stress,
                   cfg.bulk_props.hardening_modulus, cfg.czm_props.normal_strength,
                   cfg.czm_props.shear_strength, cfg.czm_props.g_ic, cfg.czm_props.g_iic,
                   cfg.czm_props.eta, cfg.czm_props.penalty_stiffness})
    blob += format_g17(g) + ",";
  auto append_mat = [&blob](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) blob += format_g17(m(r, c)) + ",";
  };
  append_mat(t.volume_weights);
  append_mat(t.loc_bulk);
  append_mat(t.loc_coh);
  append_mat(t.coupling);
  t.hash = hex64(fnv1a64(blob));

  // calibration probe: standard GP paths must wake up the cohesive layer
  if (cfg.n_cohesive > 0) {
    GpConfig probe;
    const GpSampler sampler(probe);
    const int n_probe = 8;
    int paths_active = 0;
    double max_damage = 0.0;
    double sum_frac = 0.0;
    for (int p = 0; p < n_probe; ++p) {
      StrainPath path = sampler.sample(derive_seed(cfg.rng_seed ^ 0x7ea0c5ull, p));
      const auto resp = teacher_respond(t, path);
      const Eigen::VectorXd& d_end = resp.damage.back();
      const double frac = (d_end.array() > 0.1).count() / double(cfg.n_cohesive);
      sum_frac += frac;
      max_damage = std::max(max_damage, d_end.maxCoeff());
      if (frac >= 0.25) ++paths_active;
    }
    std::ostringstream log;
    log << "teacher probe: " << n_probe << " gp paths, max damage " << max_damage
        << ", mean fraction of points with d>0.1 " << (sum_frac / n_probe)
        << ", paths with >=25% active points " << paths_active << "/" << n_probe;
    t.build_log = log.str();
    if (max_damage < 0.05)
      throw NumericsError(
          "teacher_build: no damage activity on probe paths; increase coh_gain (" +
          t.build_log + ")");
  }
  return t;
}

// Applies teacher_respond to every path (parallel across paths, order
// preserved) and assembles the dataset with the teacher's property echo.
inline Dataset gen_dataset(const Teacher& teacher, const std::vector<StrainPath>& paths,
                           int n_threads = 0, bool keep_damage = true) {
  Dataset ds;
  ds.bulk_props = teacher.config.bulk_props;
  ds.czm_props = teacher.config.czm_props;
  ds.teacher_hash = teacher.hash;
  ds.paths.resize(paths.size());
  parallel_for(paths.size(), n_threads, [&](std::size_t i) {
    auto resp = teacher_respond(teacher, paths[i]);
    DatasetPath dp;
    dp.id = static_cast<int>(i);
    dp.path = paths[i];
    dp.stresses = std::move(resp.stresses);
    if (keep_damage) dp.damage = std::move(resp.damage);
    ds.paths[i] = std::move(dp);
  });
  return ds;
}

}  // namespace prnn

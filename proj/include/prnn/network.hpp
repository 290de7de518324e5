#pragma once

#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "prnn/cohesive.hpp"
#include "prnn/j2_plasticity.hpp"
#include "prnn/strain_path.hpp"
#include "prnn/util.hpp"

namespace prnn {

enum class Architecture { Prnn1, Prnn2, Prnn3 };

inline const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::Prnn1: return "prnn1";
    case Architecture::Prnn2: return "prnn2";
    case Architecture::Prnn3: return "prnn3";
  }
  return "?";
}

inline Architecture architecture_from_string(const std::string& s) {
  if (s == "prnn1") return Architecture::Prnn1;
  if (s == "prnn2") return Architecture::Prnn2;
  if (s == "prnn3") return Architecture::Prnn3;
  throw ConfigError("unknown architecture: " + s);
}

struct LayerSizes {
  int n_bulk = 1;
  int n_cohesive = 0;

  int bulk_width() const { return 3 * n_bulk; }
  int cohesive_width() const { return 2 * n_cohesive; }

  void validate() const {
    if (n_bulk < 1) throw ConfigError("LayerSizes: n_bulk must be >= 1");
    if (n_cohesive < 0) throw ConfigError("LayerSizes: n_cohesive must be >= 0");
  }
};

// Piece-wise cohesive-input activation, applied on the normal component. The
// slope w and threshold b are strictly positive (mapped through SoftPlus from
// their raw values).
inline double leaky_normal(double x, double w, double b) {
  return x >= b ? w * (x - b) : 0.01 * w * (x - b);
}

// Symmetric three-branch form for the shear component.
inline double leaky_shear(double x, double w, double b) {
  if (x >= b) return w * (x - b + 0.01 * b);
  if (x <= -b) return w * (x + b - 0.01 * b);
  return 0.01 * w * x;
}

// Weights of one PRNN. Encoder and decoder are bias-free; decoder weights act
// through SoftPlus so the effective homogenization weights stay positive.
struct NetworkParams {
  Architecture architecture = Architecture::Prnn3;
  LayerSizes sizes;
  bool leaky_cohesive = false;

  Eigen::MatrixXd w_eps_bulk;   // (3B x 3) strain encoder, bulk partition
  Eigen::MatrixXd w_eps_coh;    // (2C x 3) strain encoder, cohesive partition
  Eigen::MatrixXd w_damage;     // (3B x C) damage coupling, PRNN2/PRNN3 only
  Eigen::MatrixXd raw_decoder;  // (3 x 3B+2C) for PRNN1, (3 x 3B) otherwise
  Eigen::VectorXd raw_act_w;    // (2C) leaky activation slopes (raw)
  Eigen::VectorXd raw_act_b;    // (2C) leaky activation thresholds (raw)

  int decoder_inputs() const {
    return architecture == Architecture::Prnn1 ? sizes.bulk_width() + sizes.cohesive_width()
                                               : sizes.bulk_width();
  }

  bool has_damage_coupling() const { return architecture != Architecture::Prnn1; }

  void validate() const {
    sizes.validate();
    if (w_eps_bulk.rows() != sizes.bulk_width() || w_eps_bulk.cols() != 3)
      throw ConfigError("NetworkParams: bad w_eps_bulk shape");
    if (w_eps_coh.rows() != sizes.cohesive_width() || w_eps_coh.cols() != 3)
      throw ConfigError("NetworkParams: bad w_eps_coh shape");
    if (has_damage_coupling()) {
      if (w_damage.rows() != sizes.bulk_width() || w_damage.cols() != sizes.n_cohesive)
        throw ConfigError("NetworkParams: bad w_damage shape");
    } else if (w_damage.size() != 0) {
      throw ConfigError("NetworkParams: PRNN1 has no damage coupling");
    }
    if (raw_decoder.rows() != 3 || raw_decoder.cols() != decoder_inputs())
      throw ConfigError("NetworkParams: bad raw_decoder shape");
    if (leaky_cohesive) {
      if (architecture == Architecture::Prnn1)
        throw ConfigError("NetworkParams: leaky cohesive input requires PRNN2 or PRNN3");
      if (raw_act_w.size() != sizes.cohesive_width() || raw_act_b.size() != sizes.cohesive_width())
        throw ConfigError("NetworkParams: bad leaky activation parameter size");
    } else if (raw_act_w.size() != 0 || raw_act_b.size() != 0) {
      throw ConfigError("NetworkParams: activation parameters present without leaky mode");
    }
  }

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(w_eps_bulk.size() + w_eps_coh.size() + w_damage.size() +
                                    raw_decoder.size() + raw_act_w.size() + raw_act_b.size());
  }

  // Canonical flat layout (row-major per block, blocks in declaration order);
  // the optimizer and checkpoints both rely on it.
  Eigen::VectorXd flatten() const {
    Eigen::VectorXd v(parameter_count());
    Eigen::Index at = 0;
    auto put = [&](const Eigen::MatrixXd& mat) {
      for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < mat.cols(); ++c) v[at++] = mat(r, c);
    };
    put(w_eps_bulk);
    put(w_eps_coh);
    put(w_damage);
    put(raw_decoder);
    put(raw_act_w);
    put(raw_act_b);
    return v;
  }

  void unflatten(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != static_cast<Eigen::Index>(parameter_count()))
      throw std::invalid_argument("NetworkParams::unflatten: size mismatch");
    Eigen::Index at = 0;
    auto take = [&](Eigen::MatrixXd& mat) {
      for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < mat.cols(); ++c) mat(r, c) = v[at++];
    };
    take(w_eps_bulk);
    take(w_eps_coh);
    take(w_damage);
    take(raw_decoder);
    Eigen::MatrixXd aw = raw_act_w, ab = raw_act_b;
    take(aw);
    take(ab);
    raw_act_w = aw;
    raw_act_b = ab;
  }

  // Uniform [-r, r] with r = 1/sqrt(fan-in) per block; raw decoder entries use
  // the same law shifted so the effective weights start near 1/(#inputs),
  // the scale of discrete homogenization weights.
  static NetworkParams init(Architecture arch, LayerSizes sizes, std::uint64_t seed,
                            bool leaky = false) {
    sizes.validate();
    NetworkParams p;
    p.architecture = arch;
    p.sizes = sizes;
    p.leaky_cohesive = leaky && arch != Architecture::Prnn1;

    std::mt19937_64 rng(seed);
    auto fill = [&rng](Eigen::MatrixXd& mat, double r, double shift = 0.0) {
      std::uniform_real_distribution<double> dist(-r, r);
      for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = dist(rng) + shift;
    };

    const double r_enc = 1.0 / std::sqrt(3.0);
    p.w_eps_bulk.resize(sizes.bulk_width(), 3);
    fill(p.w_eps_bulk, r_enc);
    p.w_eps_coh.resize(sizes.cohesive_width(), 3);
    fill(p.w_eps_coh, r_enc);
    if (arch != Architecture::Prnn1) {
      p.w_damage.resize(sizes.bulk_width(), sizes.n_cohesive);
      if (sizes.n_cohesive > 0) fill(p.w_damage, 1.0 / std::sqrt(double(sizes.n_cohesive)));
    } else {
      p.w_damage.resize(0, 0);
    }
    const int dec_in = arch == Architecture::Prnn1 ? sizes.bulk_width() + sizes.cohesive_width()
                                                   : sizes.bulk_width();
    p.raw_decoder.resize(3, dec_in);
    fill(p.raw_decoder, 1.0 / std::sqrt(double(dec_in)), softplus_inverse(1.0 / double(dec_in)));
    if (p.leaky_cohesive) {
      Eigen::MatrixXd aw(sizes.cohesive_width(), 1), ab(sizes.cohesive_width(), 1);
      fill(aw, 1.0);
      fill(ab, 1.0);
      p.raw_act_w = aw;
      p.raw_act_b = ab;
    }
    p.validate();
    return p;
  }
};

// One PRNN together with the constitutive parameters of its material layer.
struct PrnnModel {
  NetworkParams params;
  BulkProps bulk_props;
  CzmProps czm_props;
};

struct NetworkState {
  std::vector<BulkState> bulk;
  std::vector<CohesiveState> cohesive;

  explicit NetworkState(const LayerSizes& sizes = {})
      : bulk(sizes.n_bulk), cohesive(sizes.n_cohesive) {}

  Eigen::VectorXd damage_vector() const {
    Eigen::VectorXd d(cohesive.size());
    for (std::size_t k = 0; k < cohesive.size(); ++k) d[k] = cohesive[k].damage;
    return d;
  }
};

// Per-step diagnostics: local strains, jumps, damage and the local responses.
struct StepLatent {
  Eigen::VectorXd bulk_strain;  // (3B)
  Eigen::VectorXd bulk_stress;  // (3B)
  Eigen::VectorXd jump;         // (2C)
  Eigen::VectorXd traction;     // (2C)
  Eigen::VectorXd damage;       // (C), end-of-step values
};

struct PathPrediction {
  std::vector<Eigen::Vector3d> stresses;
  std::vector<StepLatent> latents;  // filled only when requested
};

// --- layer maps -------------------------------------------------------------

// Bias-free linear encoder; zero macro strain maps to zero local inputs.
inline void encode(const NetworkParams& p, const Eigen::Vector3d& eps_macro,
                   Eigen::VectorXd& bulk_local, Eigen::VectorXd& coh_local) {
  bulk_local.noalias() = p.w_eps_bulk * eps_macro;
  coh_local.noalias() = p.w_eps_coh * eps_macro;
}

// Cohesive jumps from the macro strain: the encoder rows directly, or the
// leaky piece-wise activation applied on top of them.
inline Eigen::VectorXd cohesive_input(const NetworkParams& p, const Eigen::Vector3d& eps_macro) {
  Eigen::VectorXd pre = p.w_eps_coh * eps_macro;
  if (!p.leaky_cohesive) return pre;
  Eigen::VectorXd out(pre.size());
  for (Eigen::Index i = 0; i < pre.size(); ++i) {
    const double w = softplus(p.raw_act_w[i]);
    const double b = softplus(p.raw_act_b[i]);
    out[i] = (i % 2 == 0) ? leaky_normal(pre[i], w, b) : leaky_shear(pre[i], w, b);
  }
  return out;
}

// PRNN2: additive superposition of the strain-driven and damage-driven terms.
inline Eigen::VectorXd bulk_input_prnn2(const NetworkParams& p, const Eigen::Vector3d& eps_macro,
                                        const Eigen::VectorXd& damage) {
  Eigen::VectorXd out = p.w_eps_bulk * eps_macro;
  if (damage.size() > 0) out.noalias() += p.w_damage * damage;
  return out;
}

// PRNN3: the damage-driven SoftPlus amplifier scales the encoded strain
// component-wise; the amplifier is strictly positive.
inline Eigen::VectorXd bulk_input_prnn3(const NetworkParams& p, const Eigen::Vector3d& eps_macro,
                                        const Eigen::VectorXd& damage) {
  Eigen::VectorXd encoded = p.w_eps_bulk * eps_macro;
  Eigen::VectorXd arg = Eigen::VectorXd::Ones(encoded.size());
  if (damage.size() > 0) arg.noalias() += p.w_damage * damage;
  return arg.unaryExpr([](double x) { return softplus(x); }).cwiseProduct(encoded);
}

// Decoder: SoftPlus-positive weights, zero bias. For PRNN1 `locals` holds
// bulk stresses followed by cohesive tractions; for PRNN2/3 bulk only.
inline Eigen::Vector3d decode(const NetworkParams& p, const Eigen::VectorXd& locals) {
  if (locals.size() != p.decoder_inputs())
    throw std::invalid_argument("decode: local stress vector size mismatch");
  return p.raw_decoder.unaryExpr([](double x) { return softplus(x); }) * locals;
}

// --- recurrent pass ---------------------------------------------------------

inline Eigen::Vector3d forward_step(const PrnnModel& model, const Eigen::Vector3d& eps_macro,
                                    NetworkState& state, StepLatent* latent = nullptr) {
  const NetworkParams& p = model.params;
  const int nb = p.sizes.n_bulk;
  const int nc = p.sizes.n_cohesive;

  Eigen::VectorXd jumps;
  Eigen::VectorXd tractions(2 * nc);
  if (p.architecture == Architecture::Prnn1) {
    jumps.noalias() = p.w_eps_coh * eps_macro;
  } else {
    jumps = cohesive_input(p, eps_macro);
  }
  for (int k = 0; k < nc; ++k) {
    const CzmResult r = czm_update(jumps.segment<2>(2 * k), state.cohesive[k], model.czm_props);
    state.cohesive[k] = r.state;
    tractions.segment<2>(2 * k) = r.traction;
  }
  const Eigen::VectorXd damage = state.damage_vector();

  Eigen::VectorXd bulk_strain;
  switch (p.architecture) {
    case Architecture::Prnn1: bulk_strain.noalias() = p.w_eps_bulk * eps_macro; break;
    case Architecture::Prnn2: bulk_strain = bulk_input_prnn2(p, eps_macro, damage); break;
    case Architecture::Prnn3: bulk_strain = bulk_input_prnn3(p, eps_macro, damage); break;
  }

  Eigen::VectorXd bulk_stress(3 * nb);
  for (int i = 0; i < nb; ++i) {
    const J2Result r = j2_update(bulk_strain.segment<3>(3 * i), state.bulk[i], model.bulk_props);
    state.bulk[i] = r.state;
    bulk_stress.segment<3>(3 * i) = r.stress;
  }

  Eigen::Vector3d sigma_macro;
  if (p.architecture == Architecture::Prnn1) {
    Eigen::VectorXd locals(3 * nb + 2 * nc);
    locals << bulk_stress, tractions;
    sigma_macro = decode(p, locals);
  } else {
    sigma_macro = decode(p, bulk_stress);
  }

  if (latent) {
    latent->bulk_strain = bulk_strain;
    latent->bulk_stress = bulk_stress;
    latent->jump = jumps;
    latent->traction = tractions;
    latent->damage = damage;
  }
  return sigma_macro;
}

inline PathPrediction forward_path(const PrnnModel& model, const StrainPath& path,
                                   bool record_latents = false) {
  model.params.validate();
  NetworkState state(model.params.sizes);
  PathPrediction pred;
  pred.stresses.reserve(path.steps.size());
  if (record_latents) pred.latents.resize(path.steps.size());
  for (std::size_t t = 0; t < path.steps.size(); ++t) {
    StepLatent* latent = record_latents ? &pred.latents[t] : nullptr;
    pred.stresses.push_back(forward_step(model, path.steps[t], state, latent));
  }
  return pred;
}

// Smallest distance (in local-input units) from any constitutive evaluation
// along the path to a branch switch of its law. Gradient checks against a
// global finite-difference oracle exclude paths that pass too close to one.
inline double min_branch_distance(const PrnnModel& model, const StrainPath& path) {
  const NetworkParams& p = model.params;
  const int nb = p.sizes.n_bulk;
  const int nc = p.sizes.n_cohesive;
  NetworkState state(p.sizes);
  double dist = std::numeric_limits<double>::infinity();

  for (const auto& eps : path.steps) {
    Eigen::VectorXd jumps;
    if (p.architecture == Architecture::Prnn1) {
      jumps = p.w_eps_coh * eps;
    } else {
      if (p.leaky_cohesive) {
        const Eigen::VectorXd pre = p.w_eps_coh * eps;
        for (int i = 0; i < 2 * nc; ++i) {
          const double b = softplus(p.raw_act_b[i]);
          dist = std::min(dist, std::abs(pre[i] - b));
          if (i % 2 == 1) dist = std::min(dist, std::abs(pre[i] + b));
        }
      }
      jumps = cohesive_input(p, eps);
    }
    for (int k = 0; k < nc; ++k) {
      dist = std::min(dist,
                      czm_branch_distance(jumps.segment<2>(2 * k), state.cohesive[k],
                                          model.czm_props));
      const CzmResult r = czm_update(jumps.segment<2>(2 * k), state.cohesive[k], model.czm_props);
      state.cohesive[k] = r.state;
    }
    const Eigen::VectorXd damage = state.damage_vector();

    Eigen::VectorXd bulk_strain;
    switch (p.architecture) {
      case Architecture::Prnn1: bulk_strain = p.w_eps_bulk * eps; break;
      case Architecture::Prnn2: bulk_strain = bulk_input_prnn2(p, eps, damage); break;
      case Architecture::Prnn3: bulk_strain = bulk_input_prnn3(p, eps, damage); break;
    }
    for (int i = 0; i < nb; ++i) {
      dist = std::min(dist, j2_branch_distance(bulk_strain.segment<3>(3 * i), state.bulk[i],
                                               model.bulk_props));
      const J2Result r = j2_update(bulk_strain.segment<3>(3 * i), state.bulk[i], model.bulk_props);
      state.bulk[i] = r.state;
    }
  }
  return dist;
}

}  // namespace prnn

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "prnn/strain_path.hpp"
#include "prnn/util.hpp"

namespace prnn {

// Squared-exponential GP over the step index; each strain component is an
// independent draw from N(mean, Sigma).
struct GpConfig {
  double variance = 1.667e-4;    // sigma_f^2, strain^2
  double length_scale = 200.0;   // ell, in steps
  int n_steps = 100;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(variance > 0.0)) throw ConfigError("GpConfig: variance must be > 0");
    if (!(length_scale > 0.0)) throw ConfigError("GpConfig: length scale must be > 0");
    if (n_steps < 2) throw ConfigError("GpConfig: n_steps must be >= 2");
  }

  std::string echo() const {
    return "{\"type\":\"gp\",\"sigma_f2\":" + format_g17(variance) +
           ",\"ell\":" + format_g17(length_scale) + ",\"n_steps\":" + std::to_string(n_steps) +
           "}";
  }
};

inline double gp_covariance(int i, int j, const GpConfig& cfg) {
  const double d = static_cast<double>(i - j);
  return cfg.variance * std::exp(-d * d / (2.0 * cfg.length_scale * cfg.length_scale));
}

// Holds the Cholesky factor so many paths can be drawn from one config.
class GpSampler {
 public:
  explicit GpSampler(const GpConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    const int n = cfg.n_steps;
    Eigen::MatrixXd sigma(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sigma(i, j) = gp_covariance(i, j, cfg);

    double jitter = 1.0e-12 * cfg.variance;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd work = sigma;
      work.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(work);
      if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        return;
      }
      jitter *= 100.0;
    }
    throw NumericsError("GpSampler: covariance factorization failed after jitter escalation");
  }

  StrainPath sample(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = cfg_.n_steps;
    Eigen::MatrixXd comps(n, 3);
    Eigen::VectorXd z(n);
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < n; ++i) z[i] = normal(rng);
      comps.col(c) = factor_ * z;
      comps.col(c).array() += cfg_.mean[c];
    }
    StrainPath path;
    path.provenance = Provenance::Gp;
    path.seed = seed;
    path.cycles = 0;
    path.config_echo = cfg_.echo();
    path.steps.reserve(n);
    for (int i = 0; i < n; ++i) path.steps.emplace_back(comps(i, 0), comps(i, 1), comps(i, 2));
    return path;
  }

  const GpConfig& config() const { return cfg_; }

 private:
  GpConfig cfg_;
  Eigen::MatrixXd factor_;
};

inline StrainPath gp_sample(const GpConfig& cfg) { return GpSampler(cfg).sample(cfg.rng_seed); }

}  // namespace prnn

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "prnn/util.hpp"

namespace prnn {

enum class Provenance { Gp, ProportionalFundamental, ProportionalRandom };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Gp: return "gp";
    case Provenance::ProportionalFundamental: return "proportional_fundamental";
    case Provenance::ProportionalRandom: return "proportional_random";
  }
  return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "gp") return Provenance::Gp;
  if (s == "proportional_fundamental") return Provenance::ProportionalFundamental;
  if (s == "proportional_random") return Provenance::ProportionalRandom;
  throw ConfigError("unknown provenance: " + s);
}

// A macroscopic strain history in engineering components (exx, eyy, gxy).
struct StrainPath {
  std::vector<Eigen::Vector3d> steps;
  Provenance provenance = Provenance::Gp;
  std::uint64_t seed = 0;
  int cycles = 0;               // unloading cycles for proportional paths
  std::string config_echo;      // compact JSON echo of the generator config
};

// --- proportional loading ----------------------------------------------------

struct UnloadWindow {
  int start = 0;   // 0-based step index of the first unloading increment
  int length = 0;  // number of unloading increments
};

enum class MagnitudeKind { Monotonic, OneCycle, TwoCycles };

inline int cycles_of(MagnitudeKind k) {
  return k == MagnitudeKind::Monotonic ? 0 : (k == MagnitudeKind::OneCycle ? 1 : 2);
}

inline MagnitudeKind magnitude_kind_from_cycles(int cycles) {
  switch (cycles) {
    case 0: return MagnitudeKind::Monotonic;
    case 1: return MagnitudeKind::OneCycle;
    case 2: return MagnitudeKind::TwoCycles;
    default: throw ConfigError("cycles must be 0, 1 or 2");
  }
}

// One cycle unloads at half the path for 20% of it; two cycles unload at 35%
// and 70% for 15% each.
inline std::vector<UnloadWindow> default_unload_windows(MagnitudeKind kind, int n_steps) {
  auto at = [n_steps](double frac) { return static_cast<int>(std::lround(frac * n_steps)); };
  switch (kind) {
    case MagnitudeKind::Monotonic: return {};
    case MagnitudeKind::OneCycle: return {{at(0.5), std::max(1, at(0.2))}};
    case MagnitudeKind::TwoCycles:
      return {{at(0.35), std::max(1, at(0.15))}, {at(0.70), std::max(1, at(0.15))}};
  }
  return {};
}

// Piece-wise linear magnitude: slope +s while loading, -s inside each unload
// window. The series starts one increment in (m[0] = s for pure loading).
inline std::vector<double> magnitude_series(int n_steps, double step_size,
                                            const std::vector<UnloadWindow>& windows) {
  if (n_steps < 1) throw ConfigError("magnitude_series: n_steps must be >= 1");
  if (!(step_size > 0.0)) throw ConfigError("magnitude_series: step size must be > 0");
  std::vector<int> slope(n_steps, +1);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& win = windows[w];
    if (win.length < 1 || win.start < 0 || win.start + win.length > n_steps)
      throw ConfigError("magnitude_series: unload window outside the path");
    for (int t = win.start; t < win.start + win.length; ++t) {
      if (slope[t] < 0) throw ConfigError("magnitude_series: unload windows overlap");
      slope[t] = -1;
    }
  }
  std::vector<double> m(n_steps);
  double value = 0.0;
  for (int t = 0; t < n_steps; ++t) {
    value += slope[t] * step_size;
    if (value < 0.0) throw ConfigError("magnitude_series: magnitude would become negative");
    m[t] = value;
  }
  return m;
}

struct ProportionalConfig {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  double step_size = 1.67e-3;
  MagnitudeKind kind = MagnitudeKind::Monotonic;
  std::vector<UnloadWindow> windows;  // empty -> defaults for `kind`
  int n_steps = 40;

  void validate() const {
    if (std::abs(direction.norm() - 1.0) > 1.0e-12)
      throw ConfigError("ProportionalConfig: direction must be a unit vector");
    if (!(step_size > 0.0)) throw ConfigError("ProportionalConfig: step size must be > 0");
    if (n_steps < 1) throw ConfigError("ProportionalConfig: n_steps must be >= 1");
  }
};

// The 18 fundamental loading directions: uniaxial tension/compression and
// shear along each strain axis, biaxial combinations, and axis+shear
// combinations. Frozen order, all unit norm.
inline std::vector<Eigen::Vector3d> fundamental_directions() {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Eigen::Vector3d> dirs = {
      {1, 0, 0},  {-1, 0, 0},  {0, 1, 0},  {0, -1, 0},  {0, 0, 1},  {0, 0, -1},
      {r, r, 0},  {-r, -r, 0}, {r, -r, 0}, {-r, r, 0},
      {r, 0, r},  {-r, 0, -r}, {r, 0, -r}, {-r, 0, r},
      {0, r, r},  {0, -r, -r}, {0, r, -r}, {0, -r, r},
  };
  return dirs;
}

// Three N(0,1) draws normalized to a unit vector.
inline Eigen::Vector3d random_direction(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    const double n = v.norm();
    if (n > 1.0e-300) return v / n;
  }
}

inline StrainPath proportional_path(const ProportionalConfig& cfg, Provenance provenance,
                                    std::uint64_t seed) {
  cfg.validate();
  const auto windows =
      cfg.windows.empty() ? default_unload_windows(cfg.kind, cfg.n_steps) : cfg.windows;
  const auto mags = magnitude_series(cfg.n_steps, cfg.step_size, windows);
  StrainPath path;
  path.provenance = provenance;
  path.seed = seed;
  path.cycles = cycles_of(cfg.kind);
  path.steps.reserve(mags.size());
  for (double m : mags) path.steps.emplace_back(m * cfg.direction);
  path.config_echo = "{\"type\":\"proportional\",\"s\":" + format_g17(cfg.step_size) +
                     ",\"n_steps\":" + std::to_string(cfg.n_steps) +
                     ",\"cycles\":" + std::to_string(path.cycles) +
                     ",\"direction\":[" + format_g17(cfg.direction[0]) + "," +
                     format_g17(cfg.direction[1]) + "," + format_g17(cfg.direction[2]) + "]}";
  return path;
}

}  // namespace prnn

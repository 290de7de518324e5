#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "prnn/dataset.hpp"
#include "prnn/network.hpp"
#include "prnn/util.hpp"

namespace prnn {

// Mean over all time steps of all paths of the squared Euclidean norm of the
// 3-component stress error (MPa^2).
inline double loss_mse(const PrnnModel& model, const std::vector<const DatasetPath*>& slice,
                       int n_threads = 0) {
  if (slice.empty()) throw std::invalid_argument("loss_mse: empty slice");
  std::vector<double> sums(slice.size(), 0.0);
  std::size_t total = 0;
  for (const auto* s : slice) total += s->path.steps.size();
  if (total == 0) throw std::invalid_argument("loss_mse: slice has no steps");
  parallel_for(slice.size(), n_threads, [&](std::size_t i) {
    const auto pred = forward_path(model, slice[i]->path);
    double acc = 0.0;
    for (std::size_t t = 0; t < pred.stresses.size(); ++t)
      acc += (pred.stresses[t] - slice[i]->stresses[t]).squaredNorm();
    sums[i] = acc;
  });
  double s = 0.0;
  for (double x : sums) s += x;
  return s / static_cast<double>(total);
}

struct ErrorReport {
  double mse = 0.0;                                        // MPa^2
  double rmse = 0.0;                                       // MPa
  std::vector<double> per_path_mse;                        // MPa^2, per path
  Eigen::Vector3d per_component_mse = Eigen::Vector3d::Zero();
};

inline ErrorReport evaluate_model(const PrnnModel& model, const std::vector<DatasetPath>& paths,
                                  int n_threads = 0) {
  if (paths.empty()) throw std::invalid_argument("evaluate_model: empty dataset");
  ErrorReport rep;
  rep.per_path_mse.resize(paths.size(), 0.0);
  std::vector<Eigen::Vector3d> comp(paths.size(), Eigen::Vector3d::Zero());
  std::vector<std::size_t> steps(paths.size(), 0);
  parallel_for(paths.size(), n_threads, [&](std::size_t i) {
    const auto pred = forward_path(model, paths[i].path);
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (std::size_t t = 0; t < pred.stresses.size(); ++t) {
      const Eigen::Vector3d e = pred.stresses[t] - paths[i].stresses[t];
      acc += e.cwiseProduct(e);
    }
    comp[i] = acc;
    steps[i] = pred.stresses.size();
    rep.per_path_mse[i] = pred.stresses.empty() ? 0.0 : acc.sum() / double(pred.stresses.size());
  });
  Eigen::Vector3d total = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    total += comp[i];
    n += steps[i];
  }
  if (n == 0) throw std::invalid_argument("evaluate_model: dataset has no steps");
  rep.per_component_mse = total / double(n);
  rep.mse = total.sum() / double(n);
  rep.rmse = std::sqrt(rep.mse);
  return rep;
}

// Pooled standard deviation of all stress components in a dataset; the
// normalization scale for teacher-relative error reporting.
inline double stress_std(const std::vector<DatasetPath>& paths) {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (const auto& p : paths)
    for (const auto& s : p.stresses)
      for (int c = 0; c < 3; ++c) {
        sum += s[c];
        sum_sq += s[c] * s[c];
        ++n;
      }
  if (n == 0) throw std::invalid_argument("stress_std: no data");
  const double mean = sum / double(n);
  return std::sqrt(std::max(0.0, sum_sq / double(n) - mean * mean));
}

}  // namespace prnn

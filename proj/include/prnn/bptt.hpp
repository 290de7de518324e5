#pragma once

#include <vector>

#include <Eigen/Core>

#include "prnn/dataset.hpp"
#include "prnn/fd_tangent.hpp"
#include "prnn/network.hpp"
#include "prnn/util.hpp"

namespace prnn {

// Gradient of the loss with respect to every trainable weight, block by block
// in the same layout as NetworkParams.
struct Gradients {
  Eigen::MatrixXd w_eps_bulk;
  Eigen::MatrixXd w_eps_coh;
  Eigen::MatrixXd w_damage;
  Eigen::MatrixXd raw_decoder;
  Eigen::VectorXd raw_act_w;
  Eigen::VectorXd raw_act_b;

  static Gradients zero_like(const NetworkParams& p) {
    Gradients g;
    g.w_eps_bulk = Eigen::MatrixXd::Zero(p.w_eps_bulk.rows(), p.w_eps_bulk.cols());
    g.w_eps_coh = Eigen::MatrixXd::Zero(p.w_eps_coh.rows(), p.w_eps_coh.cols());
    g.w_damage = Eigen::MatrixXd::Zero(p.w_damage.rows(), p.w_damage.cols());
    g.raw_decoder = Eigen::MatrixXd::Zero(p.raw_decoder.rows(), p.raw_decoder.cols());
    g.raw_act_w = Eigen::VectorXd::Zero(p.raw_act_w.size());
    g.raw_act_b = Eigen::VectorXd::Zero(p.raw_act_b.size());
    return g;
  }

  void add(const Gradients& o) {
    w_eps_bulk += o.w_eps_bulk;
    w_eps_coh += o.w_eps_coh;
    w_damage += o.w_damage;
    raw_decoder += o.raw_decoder;
    raw_act_w += o.raw_act_w;
    raw_act_b += o.raw_act_b;
  }

  Eigen::VectorXd flatten() const {
    Eigen::VectorXd v(w_eps_bulk.size() + w_eps_coh.size() + w_damage.size() +
                      raw_decoder.size() + raw_act_w.size() + raw_act_b.size());
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
};

namespace detail {

// Everything the reverse sweep needs, recorded during the forward pass.
struct PathTrajectory {
  int n_steps = 0;
  std::vector<Eigen::Vector3d> eps_macro;
  std::vector<Eigen::VectorXd> coh_pre;      // encoder output before activation (2C)
  std::vector<Eigen::VectorXd> jumps;        // (2C)
  std::vector<Eigen::VectorXd> tractions;    // (2C)
  std::vector<Eigen::VectorXd> damage;       // end-of-step (C)
  std::vector<Eigen::VectorXd> bulk_in;      // (3B)
  std::vector<Eigen::VectorXd> bulk_stress;  // (3B)
  std::vector<Eigen::VectorXd> encoded;      // PRNN3: w_eps_bulk * eps (3B)
  std::vector<Eigen::VectorXd> amp_arg;      // PRNN3: 1 + w_damage * d (3B)
  std::vector<Eigen::Vector3d> sigma_hat;
  std::vector<std::vector<BulkState>> bulk_before;
  std::vector<std::vector<CohesiveState>> coh_before;
};

inline void run_forward(const PrnnModel& model, const StrainPath& path, PathTrajectory& traj) {
  const NetworkParams& p = model.params;
  const int nb = p.sizes.n_bulk;
  const int nc = p.sizes.n_cohesive;
  const int T = static_cast<int>(path.steps.size());
  const bool prnn3 = p.architecture == Architecture::Prnn3;

  traj.n_steps = T;
  traj.eps_macro.resize(T);
  traj.coh_pre.resize(T);
  traj.jumps.resize(T);
  traj.tractions.resize(T);
  traj.damage.resize(T);
  traj.bulk_in.resize(T);
  traj.bulk_stress.resize(T);
  traj.sigma_hat.resize(T);
  traj.bulk_before.resize(T);
  traj.coh_before.resize(T);
  if (prnn3) {
    traj.encoded.resize(T);
    traj.amp_arg.resize(T);
  }

  NetworkState state(p.sizes);
  const Eigen::MatrixXd decoder_eff =
      p.raw_decoder.unaryExpr([](double x) { return softplus(x); });

  for (int t = 0; t < T; ++t) {
    const Eigen::Vector3d& eps = path.steps[t];
    traj.eps_macro[t] = eps;
    traj.coh_before[t] = state.cohesive;
    traj.bulk_before[t] = state.bulk;

    Eigen::VectorXd pre = p.w_eps_coh * eps;
    traj.coh_pre[t] = pre;
    Eigen::VectorXd jumps(2 * nc);
    if (p.leaky_cohesive) {
      for (int i = 0; i < 2 * nc; ++i) {
        const double w = softplus(p.raw_act_w[i]);
        const double b = softplus(p.raw_act_b[i]);
        jumps[i] = (i % 2 == 0) ? leaky_normal(pre[i], w, b) : leaky_shear(pre[i], w, b);
      }
    } else {
      jumps = pre;
    }
    traj.jumps[t] = jumps;

    Eigen::VectorXd tractions(2 * nc);
    for (int k = 0; k < nc; ++k) {
      const CzmResult r =
          czm_update(jumps.segment<2>(2 * k), state.cohesive[k], model.czm_props);
      state.cohesive[k] = r.state;
      tractions.segment<2>(2 * k) = r.traction;
    }
    traj.tractions[t] = tractions;
    const Eigen::VectorXd d = state.damage_vector();
    traj.damage[t] = d;

    Eigen::VectorXd bulk_in;
    switch (p.architecture) {
      case Architecture::Prnn1: bulk_in = p.w_eps_bulk * eps; break;
      case Architecture::Prnn2: bulk_in = bulk_input_prnn2(p, eps, d); break;
      case Architecture::Prnn3: {
        traj.encoded[t] = p.w_eps_bulk * eps;
        Eigen::VectorXd arg = Eigen::VectorXd::Ones(3 * nb);
        if (nc > 0) arg.noalias() += p.w_damage * d;
        traj.amp_arg[t] = arg;
        bulk_in = arg.unaryExpr([](double x) { return softplus(x); })
                      .cwiseProduct(traj.encoded[t]);
        break;
      }
    }
    traj.bulk_in[t] = bulk_in;

    Eigen::VectorXd bulk_stress(3 * nb);
    for (int i = 0; i < nb; ++i) {
      const J2Result r = j2_update(bulk_in.segment<3>(3 * i), state.bulk[i], model.bulk_props);
      state.bulk[i] = r.state;
      bulk_stress.segment<3>(3 * i) = r.stress;
    }
    traj.bulk_stress[t] = bulk_stress;

    if (p.architecture == Architecture::Prnn1) {
      Eigen::VectorXd locals(3 * nb + 2 * nc);
      locals << bulk_stress, tractions;
      traj.sigma_hat[t] = decoder_eff * locals;
    } else {
      traj.sigma_hat[t] = decoder_eff * bulk_stress;
    }
  }
}

}  // namespace detail

// Reverse-mode accumulation through the unrolled path. Material-cell
// Jacobians come from central finite differences at the recorded
// beginning-of-step states; linear and SoftPlus layers are differentiated
// analytically. `loss_scale` multiplies the per-step squared error, i.e. pass
// 1/N for the mean over N steps.
inline double accumulate_path_gradient(const PrnnModel& model, const DatasetPath& sample,
                                       double loss_scale, double fd_step, Gradients& grads,
                                       detail::PathTrajectory& traj) {
  const NetworkParams& p = model.params;
  const int nb = p.sizes.n_bulk;
  const int nc = p.sizes.n_cohesive;
  if (sample.stresses.size() != sample.path.steps.size())
    throw std::invalid_argument("accumulate_path_gradient: target length mismatch");

  detail::run_forward(model, sample.path, traj);
  const int T = traj.n_steps;

  const Eigen::MatrixXd decoder_eff =
      p.raw_decoder.unaryExpr([](double x) { return softplus(x); });
  const Eigen::MatrixXd decoder_deriv =
      p.raw_decoder.unaryExpr([](double x) { return softplus_deriv(x); });

  double loss = 0.0;

  // state adjoints flowing backward in time
  std::vector<Eigen::Vector4d> bulk_adj(nb, Eigen::Vector4d::Zero());
  std::vector<Eigen::Vector2d> coh_adj(nc, Eigen::Vector2d::Zero());

  for (int t = T - 1; t >= 0; --t) {
    const Eigen::Vector3d err = traj.sigma_hat[t] - sample.stresses[t];
    if (!err.allFinite())
      throw NumericsError("grads_bptt: non-finite prediction at path " +
                          std::to_string(sample.id) + " step " + std::to_string(t));
    loss += loss_scale * err.squaredNorm();
    const Eigen::Vector3d dsig = 2.0 * loss_scale * err;

    // decoder
    Eigen::VectorXd locals;
    if (p.architecture == Architecture::Prnn1) {
      locals.resize(3 * nb + 2 * nc);
      locals << traj.bulk_stress[t], traj.tractions[t];
    } else {
      locals = traj.bulk_stress[t];
    }
    grads.raw_decoder.noalias() += (dsig * locals.transpose()).cwiseProduct(decoder_deriv);
    const Eigen::VectorXd dlocals = decoder_eff.transpose() * dsig;

    // bulk material layer
    Eigen::VectorXd dbulk_in(3 * nb);
    for (int i = 0; i < nb; ++i) {
      const auto jac = j2_fd_jacobians(traj.bulk_in[t].segment<3>(3 * i),
                                       traj.bulk_before[t][i], model.bulk_props, fd_step);
      const Eigen::Vector3d dstress = dlocals.segment<3>(3 * i);
      dbulk_in.segment<3>(3 * i) = jac.dstress_dstrain.transpose() * dstress +
                                   jac.dstate_dstrain.transpose() * bulk_adj[i];
      bulk_adj[i] = jac.dstress_dstate.transpose() * dstress +
                    jac.dstate_dstate.transpose() * bulk_adj[i];
    }

    // bulk input layer
    Eigen::VectorXd ddamage = Eigen::VectorXd::Zero(nc);
    switch (p.architecture) {
      case Architecture::Prnn1:
      case Architecture::Prnn2: {
        grads.w_eps_bulk.noalias() += dbulk_in * traj.eps_macro[t].transpose();
        if (p.architecture == Architecture::Prnn2 && nc > 0) {
          grads.w_damage.noalias() += dbulk_in * traj.damage[t].transpose();
          ddamage.noalias() = p.w_damage.transpose() * dbulk_in;
        }
        break;
      }
      case Architecture::Prnn3: {
        const Eigen::VectorXd amp =
            traj.amp_arg[t].unaryExpr([](double x) { return softplus(x); });
        const Eigen::VectorXd dencoded = dbulk_in.cwiseProduct(amp);
        const Eigen::VectorXd darg =
            dbulk_in.cwiseProduct(traj.encoded[t])
                .cwiseProduct(traj.amp_arg[t].unaryExpr(
                    [](double x) { return softplus_deriv(x); }));
        grads.w_eps_bulk.noalias() += dencoded * traj.eps_macro[t].transpose();
        if (nc > 0) {
          grads.w_damage.noalias() += darg * traj.damage[t].transpose();
          ddamage.noalias() = p.w_damage.transpose() * darg;
        }
        break;
      }
    }

    // cohesive material layer
    Eigen::VectorXd djump(2 * nc);
    for (int k = 0; k < nc; ++k) {
      const auto jac = czm_fd_jacobians(traj.jumps[t].segment<2>(2 * k),
                                        traj.coh_before[t][k], model.czm_props, fd_step);
      Eigen::Vector2d dtraction = Eigen::Vector2d::Zero();
      if (p.architecture == Architecture::Prnn1)
        dtraction = dlocals.segment<2>(3 * nb + 2 * k);
      // damage is state component 0; couple the within-step use into the state adjoint
      Eigen::Vector2d dstate_total = coh_adj[k] + Eigen::Vector2d(ddamage[k], 0.0);
      djump.segment<2>(2 * k) = jac.dtraction_djump.transpose() * dtraction +
                                jac.dstate_djump.transpose() * dstate_total;
      coh_adj[k] = jac.dtraction_dstate.transpose() * dtraction +
                   jac.dstate_dstate.transpose() * dstate_total;
    }

    // cohesive input layer
    if (nc > 0) {
      if (p.leaky_cohesive) {
        Eigen::VectorXd dpre(2 * nc);
        for (int i = 0; i < 2 * nc; ++i) {
          const double x = traj.coh_pre[t][i];
          const double w = softplus(p.raw_act_w[i]);
          const double b = softplus(p.raw_act_b[i]);
          double dx, dw, db;
          if (i % 2 == 0) {
            const double s = x >= b ? 1.0 : 0.01;
            dx = s * w;
            dw = s * (x - b);
            db = -s * w;
          } else {
            if (x >= b) {
              dx = w;
              dw = x - b + 0.01 * b;
              db = -0.99 * w;
            } else if (x <= -b) {
              dx = w;
              dw = x + b - 0.01 * b;
              db = 0.99 * w;
            } else {
              dx = 0.01 * w;
              dw = 0.01 * x;
              db = 0.0;
            }
          }
          const double dj = djump[i];
          dpre[i] = dj * dx;
          grads.raw_act_w[i] += dj * dw * softplus_deriv(p.raw_act_w[i]);
          grads.raw_act_b[i] += dj * db * softplus_deriv(p.raw_act_b[i]);
        }
        grads.w_eps_coh.noalias() += dpre * traj.eps_macro[t].transpose();
      } else {
        grads.w_eps_coh.noalias() += djump * traj.eps_macro[t].transpose();
      }
    }
  }
  return loss;
}

// Gradient of the mean-squared-stress loss over a batch of paths, averaged
// over every time step of every path. Paths are processed in parallel; the
// reduction runs in fixed path order so results do not depend on thread count.
inline Gradients grads_bptt(const PrnnModel& model, const std::vector<const DatasetPath*>& batch,
                            double fd_step, int n_threads = 0, double* loss_out = nullptr) {
  if (batch.empty()) throw std::invalid_argument("grads_bptt: empty batch");
  std::size_t total_steps = 0;
  for (const auto* s : batch) total_steps += s->path.steps.size();
  if (total_steps == 0) throw std::invalid_argument("grads_bptt: batch has no steps");
  const double scale = 1.0 / static_cast<double>(total_steps);

  std::vector<Gradients> per_path(batch.size());
  std::vector<double> per_loss(batch.size(), 0.0);
  parallel_for(batch.size(), n_threads, [&](std::size_t i) {
    Gradients g = Gradients::zero_like(model.params);
    detail::PathTrajectory traj;
    per_loss[i] = accumulate_path_gradient(model, *batch[i], scale, fd_step, g, traj);
    per_path[i] = std::move(g);
  });

  Gradients total = Gradients::zero_like(model.params);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total.add(per_path[i]);
    loss += per_loss[i];
  }
  if (loss_out) *loss_out = loss;
  return total;
}

}  // namespace prnn

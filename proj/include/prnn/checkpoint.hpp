#pragma once

#include <string>

#include <json.hpp>

#include "prnn/adam.hpp"
#include "prnn/network.hpp"
#include "prnn/training.hpp"
#include "prnn/util.hpp"

namespace prnn {

struct Checkpoint {
  PrnnModel model;
  TrainConfig train_config;
  std::uint64_t init_seed = 0;
  std::string init_scheme = "uniform-fanin-v1";
  AdamState opt_state;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  auto& data = j["data"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return j;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ConfigError("checkpoint: matrix data length mismatch");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[at++].get<double>();
  return m;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

}  // namespace detail

inline std::string checkpoint_to_json(const Checkpoint& ck) {
  const NetworkParams& p = ck.model.params;
  nlohmann::json j;
  j["format"] = "prnn-checkpoint";
  j["version"] = 1;
  j["architecture"] = to_string(p.architecture);
  j["n_bulk"] = p.sizes.n_bulk;
  j["n_cohesive"] = p.sizes.n_cohesive;
  j["leaky"] = p.leaky_cohesive;
  j["init_seed"] = ck.init_seed;
  j["init_scheme"] = ck.init_scheme;
  j["material"] = {{"youngs_modulus", ck.model.bulk_props.youngs_modulus},
                   {"poisson_ratio", ck.model.bulk_props.poisson_ratio},
                   {"yield_stress", ck.model.bulk_props.yield_stress},
                   {"hardening_modulus", ck.model.bulk_props.hardening_modulus}};
  j["czm"] = {{"normal_strength", ck.model.czm_props.normal_strength},
              {"shear_strength", ck.model.czm_props.shear_strength},
              {"g_ic", ck.model.czm_props.g_ic},
              {"g_iic", ck.model.czm_props.g_iic},
              {"eta", ck.model.czm_props.eta},
              {"penalty_stiffness", ck.model.czm_props.penalty_stiffness}};
  j["train_config"] = {{"learning_rate", ck.train_config.learning_rate},
                       {"beta1", ck.train_config.beta1},
                       {"beta2", ck.train_config.beta2},
                       {"adam_eps", ck.train_config.adam_eps},
                       {"max_epochs", ck.train_config.max_epochs},
                       {"batch_size", ck.train_config.batch_size},
                       {"fd_step", ck.train_config.fd_step},
                       {"patience", ck.train_config.patience},
                       {"rng_seed", ck.train_config.rng_seed}};
  j["weights"] = {{"w_eps_bulk", detail::matrix_to_json(p.w_eps_bulk)},
                  {"w_eps_coh", detail::matrix_to_json(p.w_eps_coh)},
                  {"w_damage", detail::matrix_to_json(p.w_damage)},
                  {"raw_decoder", detail::matrix_to_json(p.raw_decoder)},
                  {"raw_act_w", detail::vector_to_json(p.raw_act_w)},
                  {"raw_act_b", detail::vector_to_json(p.raw_act_b)}};
  j["optimizer"] = {{"step_count", ck.opt_state.step_count},
                    {"m", detail::vector_to_json(ck.opt_state.m)},
                    {"v", detail::vector_to_json(ck.opt_state.v)}};
  return j.dump() + "\n";
}

inline Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "prnn-checkpoint")
    throw ConfigError("checkpoint: wrong format tag");
  if (j.value("version", 0) != 1) throw ConfigError("checkpoint: unsupported version");

  Checkpoint ck;
  NetworkParams& p = ck.model.params;
  p.architecture = architecture_from_string(j.at("architecture").get<std::string>());
  p.sizes = {j.at("n_bulk").get<int>(), j.at("n_cohesive").get<int>()};
  p.leaky_cohesive = j.at("leaky").get<bool>();
  ck.init_seed = j.at("init_seed").get<std::uint64_t>();
  ck.init_scheme = j.value("init_scheme", "");

  const auto& m = j.at("material");
  ck.model.bulk_props.youngs_modulus = m.at("youngs_modulus").get<double>();
  ck.model.bulk_props.poisson_ratio = m.at("poisson_ratio").get<double>();
  ck.model.bulk_props.yield_stress = m.at("yield_stress").get<double>();
  ck.model.bulk_props.hardening_modulus = m.at("hardening_modulus").get<double>();
  const auto& c = j.at("czm");
  ck.model.czm_props.normal_strength = c.at("normal_strength").get<double>();
  ck.model.czm_props.shear_strength = c.at("shear_strength").get<double>();
  ck.model.czm_props.g_ic = c.at("g_ic").get<double>();
  ck.model.czm_props.g_iic = c.at("g_iic").get<double>();
  ck.model.czm_props.eta = c.at("eta").get<double>();
  ck.model.czm_props.penalty_stiffness = c.at("penalty_stiffness").get<double>();

  const auto& tc = j.at("train_config");
  ck.train_config.learning_rate = tc.at("learning_rate").get<double>();
  ck.train_config.beta1 = tc.at("beta1").get<double>();
  ck.train_config.beta2 = tc.at("beta2").get<double>();
  ck.train_config.adam_eps = tc.at("adam_eps").get<double>();
  ck.train_config.max_epochs = tc.at("max_epochs").get<int>();
  ck.train_config.batch_size = tc.at("batch_size").get<int>();
  ck.train_config.fd_step = tc.at("fd_step").get<double>();
  ck.train_config.patience = tc.at("patience").get<int>();
  ck.train_config.rng_seed = tc.at("rng_seed").get<std::uint64_t>();

  const auto& w = j.at("weights");
  p.w_eps_bulk = detail::matrix_from_json(w.at("w_eps_bulk"));
  p.w_eps_coh = detail::matrix_from_json(w.at("w_eps_coh"));
  p.w_damage = detail::matrix_from_json(w.at("w_damage"));
  p.raw_decoder = detail::matrix_from_json(w.at("raw_decoder"));
  p.raw_act_w = detail::vector_from_json(w.at("raw_act_w"));
  p.raw_act_b = detail::vector_from_json(w.at("raw_act_b"));

  const auto& opt = j.at("optimizer");
  ck.opt_state.step_count = opt.at("step_count").get<long>();
  ck.opt_state.m = detail::vector_from_json(opt.at("m"));
  ck.opt_state.v = detail::vector_from_json(opt.at("v"));

  p.validate();
  return ck;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  atomic_write_file(path, checkpoint_to_json(ck));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_file(path));
}

}  // namespace prnn

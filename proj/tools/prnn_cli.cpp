// Command-line surface: dataset generation, training, model selection and
// evaluation, each reproducible from its flags and config file alone.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prnn/checkpoint.hpp"
#include "prnn/config.hpp"
#include "prnn/dataset.hpp"
#include "prnn/gp_sampler.hpp"
#include "prnn/metrics.hpp"
#include "prnn/model_selection.hpp"
#include "prnn/strain_path.hpp"
#include "prnn/teacher.hpp"
#include "prnn/training.hpp"
#include "prnn/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

fs::path resolve_out(const std::string& out) {
  fs::path p(out);
  if (p.is_relative()) {
    if (const char* root = std::getenv("PRNN_OUT_ROOT")) return fs::path(root) / p;
  }
  return p;
}

std::string file_hash(const fs::path& p) { return prnn::hex64(prnn::fnv1a64(prnn::read_file(p))); }

prnn::TeacherConfig teacher_from_config(const prnn::Config& cfg) {
  prnn::TeacherConfig tc;
  tc.n_bulk = static_cast<int>(cfg.get_int("teacher.n_bulk", tc.n_bulk));
  tc.n_cohesive = static_cast<int>(cfg.get_int("teacher.n_cohesive", tc.n_cohesive));
  tc.rng_seed = cfg.get_u64("teacher.seed", tc.rng_seed);
  tc.bulk_gain = cfg.get_double("teacher.bulk_gain", tc.bulk_gain);
  tc.coh_gain = cfg.get_double("teacher.coh_gain", tc.coh_gain);
  tc.damage_gain = cfg.get_double("teacher.damage_gain", tc.damage_gain);
  tc.bulk_props = prnn::BulkProps::from_config(cfg);
  tc.czm_props = prnn::CzmProps::from_config(cfg);
  return tc;
}

prnn::TrainConfig train_from_config(const prnn::Config& cfg) {
  prnn::TrainConfig tr;
  tr.learning_rate = cfg.get_double("train.learning_rate", tr.learning_rate);
  tr.beta1 = cfg.get_double("train.beta1", tr.beta1);
  tr.beta2 = cfg.get_double("train.beta2", tr.beta2);
  tr.adam_eps = cfg.get_double("train.adam_eps", tr.adam_eps);
  tr.max_epochs = static_cast<int>(cfg.get_int("train.max_epochs", tr.max_epochs));
  tr.batch_size = static_cast<int>(cfg.get_int("train.batch_size", tr.batch_size));
  tr.fd_step = cfg.get_double("train.fd_step", tr.fd_step);
  tr.patience = static_cast<int>(cfg.get_int("train.patience", tr.patience));
  tr.n_threads = static_cast<int>(cfg.get_int("threads", tr.n_threads));
  return tr;
}

void write_manifest(const fs::path& path, nlohmann::json manifest) {
  manifest["tool"] = prnn::kToolName;
  manifest["tool_version"] = prnn::kToolVersion;
  prnn::atomic_write_file(path, manifest.dump(1) + "\n");
}

nlohmann::json input_entry(const std::string& flag_value, const fs::path& resolved) {
  return {{"path", flag_value}, {"hash", file_hash(resolved)}};
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  return det == 0.0 ? 0.0 : (n * sxy - sx * sy) / det;
}

// --- gen-data ----------------------------------------------------------------

struct GenDataArgs {
  std::string config_path;
  std::string kind = "gp";
  int n = 0;
  int cycles = 0;
  std::uint64_t seed = 0;
  std::string out;
  int steps = 0;  // 0 = from config
  bool no_damage = false;
};

int run_gen_data(const GenDataArgs& a) {
  prnn::Config cfg = a.config_path.empty() ? prnn::Config() : prnn::Config::load(a.config_path);
  const auto teacher_cfg = teacher_from_config(cfg);
  const auto teacher = prnn::teacher_build(teacher_cfg);
  std::cerr << teacher.build_log << "\n";

  std::vector<prnn::StrainPath> paths;
  paths.reserve(a.n);
  if (a.kind == "gp") {
    prnn::GpConfig gp;
    gp.variance = cfg.get_double("gp.variance", gp.variance);
    gp.length_scale = cfg.get_double("gp.length_scale", gp.length_scale);
    gp.n_steps = static_cast<int>(cfg.get_int("gp.n_steps", gp.n_steps));
    if (a.steps > 0) gp.n_steps = a.steps;
    const prnn::GpSampler sampler(gp);
    for (int i = 0; i < a.n; ++i) paths.push_back(sampler.sample(prnn::derive_seed(a.seed, i)));
  } else if (a.kind == "prop-fund" || a.kind == "prop-rand") {
    prnn::ProportionalConfig pc;
    pc.step_size = cfg.get_double("prop.step_size", pc.step_size);
    pc.n_steps = static_cast<int>(cfg.get_int("prop.n_steps", pc.n_steps));
    if (a.steps > 0) pc.n_steps = a.steps;
    pc.kind = prnn::magnitude_kind_from_cycles(a.cycles);
    const auto fund = prnn::fundamental_directions();
    for (int i = 0; i < a.n; ++i) {
      const std::uint64_t path_seed = prnn::derive_seed(a.seed, i);
      prnn::Provenance prov;
      if (a.kind == "prop-fund") {
        pc.direction = fund[i % fund.size()];
        prov = prnn::Provenance::ProportionalFundamental;
      } else {
        pc.direction = prnn::random_direction(path_seed);
        prov = prnn::Provenance::ProportionalRandom;
      }
      paths.push_back(prnn::proportional_path(pc, prov, path_seed));
    }
  } else {
    throw prnn::ConfigError("gen-data: unknown --kind " + a.kind);
  }

  const int n_threads = static_cast<int>(cfg.get_int("threads", 0));
  const auto ds = prnn::gen_dataset(teacher, paths, n_threads, !a.no_damage);
  const fs::path out = resolve_out(a.out);
  prnn::save_dataset(out, ds);

  nlohmann::json manifest;
  manifest["command"] = "gen-data";
  manifest["flags"] = {{"kind", a.kind},   {"n", a.n},           {"cycles", a.cycles},
                       {"seed", a.seed},   {"out", a.out},       {"steps", a.steps},
                       {"no_damage", a.no_damage}};
  manifest["config_file"] = a.config_path;
  manifest["config_hash"] =
      a.config_path.empty() ? "" : file_hash(fs::path(a.config_path));
  manifest["teacher_hash"] = teacher.hash;
  manifest["teacher_build_log"] = teacher.build_log;
  write_manifest(out.string() + ".manifest.json", manifest);

  std::cout << "wrote " << ds.paths.size() << " paths to " << out.string() << "\n";
  return kExitOk;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string config_path;
  std::string arch = "prnn3";
  int bulk = 4;
  int coh = 1;
  std::uint64_t seed = 0;
  std::string train_path;
  std::string val_path;
  std::string out_dir;
  bool leaky = false;
  int epochs = 0;       // 0 = from config
  double lr = 0.0;      // 0 = from config
  int batch = 0;
  int patience = 0;
  int threads = -1;     // -1 = from config
};

std::string train_log_csv(const std::vector<prnn::EpochLog>& log) {
  std::string out = "epoch,train_mse,val_mse,wall_time_s\n";
  for (const auto& e : log)
    out += std::to_string(e.epoch) + "," + prnn::format_g17(e.train_mse) + "," +
           prnn::format_g17(e.val_mse) + "," + prnn::format_g17(e.wall_time_s) + "\n";
  return out;
}

int run_train(const TrainArgs& a) {
  prnn::Config cfg = a.config_path.empty() ? prnn::Config() : prnn::Config::load(a.config_path);
  const auto train_ds = prnn::load_dataset(resolve_out(a.train_path));
  const auto val_ds = prnn::load_dataset(resolve_out(a.val_path));
  if (train_ds.teacher_hash != val_ds.teacher_hash)
    std::cerr << "warning: train and validation sets come from different teachers\n";

  prnn::TrainConfig tc = train_from_config(cfg);
  tc.rng_seed = a.seed;
  if (a.epochs > 0) tc.max_epochs = a.epochs;
  if (a.lr > 0) tc.learning_rate = a.lr;
  if (a.batch > 0) tc.batch_size = a.batch;
  if (a.patience > 0) tc.patience = a.patience;
  if (a.threads >= 0) tc.n_threads = a.threads;

  prnn::PrnnModel model;
  model.params = prnn::NetworkParams::init(prnn::architecture_from_string(a.arch),
                                           {a.bulk, a.coh}, a.seed, a.leaky);
  model.bulk_props = train_ds.bulk_props;
  model.czm_props = train_ds.czm_props;

  const auto result = prnn::train(model, train_ds.paths, val_ds.paths, tc);

  const fs::path out = resolve_out(a.out_dir);
  fs::create_directories(out);
  prnn::Checkpoint ck;
  ck.model = result.model;
  ck.train_config = tc;
  ck.init_seed = a.seed;
  ck.opt_state = result.opt_state;
  prnn::save_checkpoint(out / "checkpoint.json", ck);
  prnn::atomic_write_file(out / "train_log.csv", train_log_csv(result.log));

  nlohmann::json manifest;
  manifest["command"] = "train";
  manifest["flags"] = {{"arch", a.arch},  {"bulk", a.bulk},       {"coh", a.coh},
                       {"seed", a.seed},  {"leaky", a.leaky},     {"train", a.train_path},
                       {"val", a.val_path}, {"out", a.out_dir}};
  manifest["config_file"] = a.config_path;
  manifest["config_hash"] = a.config_path.empty() ? "" : file_hash(fs::path(a.config_path));
  manifest["inputs"] = {{"train", input_entry(a.train_path, resolve_out(a.train_path))},
                        {"val", input_entry(a.val_path, resolve_out(a.val_path))}};
  manifest["checkpoint"] = (out / "checkpoint.json").string();
  manifest["train_config"] = {{"learning_rate", tc.learning_rate},
                              {"beta1", tc.beta1},
                              {"beta2", tc.beta2},
                              {"adam_eps", tc.adam_eps},
                              {"max_epochs", tc.max_epochs},
                              {"batch_size", tc.batch_size},
                              {"fd_step", tc.fd_step},
                              {"patience", tc.patience},
                              {"rng_seed", tc.rng_seed}};
  write_manifest(out / "manifest.json", manifest);

  if (result.diverged) {
    std::cerr << "training diverged after " << result.epochs_run
              << " epochs; wrote the last checkpoint that was best on validation\n";
    return kExitNumerical;
  }
  std::cout << "best val mse " << result.best_val_mse << " (rmse " << std::sqrt(result.best_val_mse)
            << ") at epoch " << result.best_epoch << ", ran " << result.epochs_run << " epochs\n";
  return kExitOk;
}

// --- select ------------------------------------------------------------------

struct SelectArgs {
  std::string config_path;
  std::string arch = "prnn3";
  std::string train_path;
  std::string val_path;
  std::string layers = "4+1";
  std::string train_sizes;
  int inits = 10;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool leaky = false;
  int epochs = 0;
  int threads = -1;
};

std::vector<prnn::LayerSizes> parse_layers(const std::string& text) {
  std::vector<prnn::LayerSizes> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto plus = tok.find('+');
    if (plus == std::string::npos)
      throw prnn::ConfigError("select: layer sizes look like 4+1,8+2; got " + tok);
    out.push_back({std::stoi(tok.substr(0, plus)), std::stoi(tok.substr(plus + 1))});
  }
  if (out.empty()) throw prnn::ConfigError("select: no layer sizes given");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

int run_select(const SelectArgs& a) {
  prnn::Config cfg = a.config_path.empty() ? prnn::Config() : prnn::Config::load(a.config_path);
  const auto train_ds = prnn::load_dataset(resolve_out(a.train_path));
  const auto val_ds = prnn::load_dataset(resolve_out(a.val_path));

  prnn::SelectionGrid grid;
  grid.layer_sizes = parse_layers(a.layers);
  grid.training_sizes = a.train_sizes.empty()
                            ? std::vector<int>{static_cast<int>(train_ds.paths.size())}
                            : parse_int_list(a.train_sizes);
  grid.n_inits = a.inits;

  prnn::TrainConfig tc = train_from_config(cfg);
  tc.rng_seed = a.seed;
  if (a.epochs > 0) tc.max_epochs = a.epochs;
  if (a.threads >= 0) tc.n_threads = a.threads;

  const auto result =
      prnn::model_select(grid, prnn::architecture_from_string(a.arch), a.leaky, train_ds.paths,
                         val_ds.paths, tc, train_ds.bulk_props, train_ds.czm_props);

  std::string csv = "n_bulk,n_cohesive,train_size,seed,val_mse\n";
  for (const auto& r : result.rows)
    csv += std::to_string(r.sizes.n_bulk) + "," + std::to_string(r.sizes.n_cohesive) + "," +
           std::to_string(r.train_size) + "," + std::to_string(r.seed) + "," +
           prnn::format_g17(r.val_mse) + "\n";

  const fs::path out = resolve_out(a.out_dir);
  fs::create_directories(out);
  prnn::atomic_write_file(out / "selection.csv", csv);

  nlohmann::json manifest;
  manifest["command"] = "select";
  manifest["flags"] = {{"arch", a.arch},       {"layers", a.layers},
                       {"train_sizes", a.train_sizes}, {"inits", a.inits},
                       {"seed", a.seed},       {"leaky", a.leaky},
                       {"train", a.train_path}, {"val", a.val_path}};
  manifest["config_file"] = a.config_path;
  manifest["config_hash"] = a.config_path.empty() ? "" : file_hash(fs::path(a.config_path));
  manifest["inputs"] = {{"train", input_entry(a.train_path, resolve_out(a.train_path))},
                        {"val", input_entry(a.val_path, resolve_out(a.val_path))}};
  manifest["selected"] = {{"n_bulk", result.selected_sizes.n_bulk},
                          {"n_cohesive", result.selected_sizes.n_cohesive},
                          {"train_size", result.selected_train_size},
                          {"val_mse", result.selected_val_mse}};
  write_manifest(out / "manifest.json", manifest);

  std::cout << "selected " << result.selected_sizes.n_bulk << "+"
            << result.selected_sizes.n_cohesive << " trained on " << result.selected_train_size
            << " paths, val mse " << result.selected_val_mse << "\n";
  return kExitOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint_path;
  std::string data_path;
  std::string out_dir;
  int threads = 0;
};

// Unload windows are recovered from the magnitude signal itself: maximal runs
// of strictly decreasing magnitude, each followed by a reload of equal length.
struct UnloadReload {
  int unload_begin, unload_end;  // [begin, end)
  int reload_end;
};

std::vector<UnloadReload> find_unload_windows(const std::vector<double>& m) {
  std::vector<UnloadReload> out;
  const int n = static_cast<int>(m.size());
  int t = 1;
  while (t < n) {
    if (m[t] < m[t - 1]) {
      const int begin = t;
      while (t < n && m[t] < m[t - 1]) ++t;
      const int end = t;
      out.push_back({begin, end, std::min(n, end + (end - begin))});
    } else {
      ++t;
    }
  }
  return out;
}

int run_eval(const EvalArgs& a) {
  const auto ck = prnn::load_checkpoint(resolve_out(a.checkpoint_path));
  const auto ds = prnn::load_dataset(resolve_out(a.data_path));
  if (ds.bulk_props.youngs_modulus != ck.model.bulk_props.youngs_modulus)
    std::cerr << "warning: dataset material properties differ from the checkpoint\n";

  std::vector<prnn::PathPrediction> preds(ds.paths.size());
  prnn::parallel_for(ds.paths.size(), a.threads, [&](std::size_t i) {
    preds[i] = prnn::forward_path(ck.model, ds.paths[i].path);
  });

  // per-path error report
  std::string report = "path_id,provenance,cycles,n_steps,mse,rmse\n";
  double total_sq = 0.0;
  std::size_t total_steps = 0;
  for (std::size_t i = 0; i < ds.paths.size(); ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < preds[i].stresses.size(); ++t)
      acc += (preds[i].stresses[t] - ds.paths[i].stresses[t]).squaredNorm();
    total_sq += acc;
    total_steps += preds[i].stresses.size();
    const double mse = preds[i].stresses.empty() ? 0.0 : acc / double(preds[i].stresses.size());
    report += std::to_string(ds.paths[i].id) + "," + to_string(ds.paths[i].path.provenance) +
              "," + std::to_string(ds.paths[i].path.cycles) + "," +
              std::to_string(preds[i].stresses.size()) + "," + prnn::format_g17(mse) + "," +
              prnn::format_g17(std::sqrt(mse)) + "\n";
  }

  // per-step predicted vs target stresses
  std::string pred_csv =
      "path_id,step,eps_xx,eps_yy,gamma_xy,sigma_xx,sigma_yy,sigma_xy,pred_xx,pred_yy,pred_xy\n";
  for (std::size_t i = 0; i < ds.paths.size(); ++i) {
    for (std::size_t t = 0; t < preds[i].stresses.size(); ++t) {
      const auto& eps = ds.paths[i].path.steps[t];
      const auto& sig = ds.paths[i].stresses[t];
      const auto& hat = preds[i].stresses[t];
      pred_csv += std::to_string(ds.paths[i].id) + "," + std::to_string(t);
      for (const double* v : {&eps[0], &eps[1], &eps[2], &sig[0], &sig[1], &sig[2], &hat[0],
                              &hat[1], &hat[2]})
        pred_csv += "," + prnn::format_g17(*v);
      pred_csv += "\n";
    }
  }

  // unload/reload slope report for cyclic proportional paths
  std::string slope_csv;
  bool any_cycles = false;
  for (const auto& p : ds.paths)
    if (p.path.cycles >= 1 && p.path.provenance != prnn::Provenance::Gp) any_cycles = true;
  if (any_cycles) {
    slope_csv =
        "path_id,window,component,slope_initial,slope_unload,slope_reload,"
        "pred_slope_initial,pred_slope_unload,pred_slope_reload\n";
    for (std::size_t i = 0; i < ds.paths.size(); ++i) {
      const auto& p = ds.paths[i];
      if (p.path.cycles < 1 || p.path.provenance == prnn::Provenance::Gp) continue;
      Eigen::Vector3d dir = Eigen::Vector3d::Zero();
      for (const auto& s : p.path.steps)
        if (s.norm() > dir.norm()) dir = s;
      if (dir.norm() == 0.0) continue;
      dir.normalize();
      std::vector<double> mag(p.path.steps.size());
      for (std::size_t t = 0; t < p.path.steps.size(); ++t) mag[t] = p.path.steps[t].dot(dir);
      const auto windows = find_unload_windows(mag);
      const int init_end =
          windows.empty() ? static_cast<int>(mag.size()) : windows.front().unload_begin;
      for (std::size_t w = 0; w < windows.size(); ++w) {
        for (int c = 0; c < 3; ++c) {
          auto gather = [&](int begin, int end, bool predicted) {
            std::vector<double> xs, ys;
            for (int t = std::max(0, begin - 1); t < end; ++t) {
              xs.push_back(mag[t]);
              ys.push_back(predicted ? preds[i].stresses[t][c] : p.stresses[t][c]);
            }
            return ls_slope(xs, ys);
          };
          const auto& win = windows[w];
          slope_csv += std::to_string(p.id) + "," + std::to_string(w) + "," + std::to_string(c) +
                       "," + prnn::format_g17(gather(0, std::min(init_end, 6), false)) + "," +
                       prnn::format_g17(gather(win.unload_begin, win.unload_end, false)) + "," +
                       prnn::format_g17(gather(win.unload_end, win.reload_end, false)) + "," +
                       prnn::format_g17(gather(0, std::min(init_end, 6), true)) + "," +
                       prnn::format_g17(gather(win.unload_begin, win.unload_end, true)) + "," +
                       prnn::format_g17(gather(win.unload_end, win.reload_end, true)) + "\n";
        }
      }
    }
  }

  const fs::path out = resolve_out(a.out_dir);
  fs::create_directories(out);
  prnn::atomic_write_file(out / "report.csv", report);
  prnn::atomic_write_file(out / "predictions.csv", pred_csv);
  if (any_cycles) prnn::atomic_write_file(out / "slopes.csv", slope_csv);

  nlohmann::json manifest;
  manifest["command"] = "eval";
  manifest["flags"] = {{"checkpoint", a.checkpoint_path}, {"data", a.data_path}, {"out", a.out_dir}};
  manifest["inputs"] = {
      {"checkpoint", input_entry(a.checkpoint_path, resolve_out(a.checkpoint_path))},
      {"data", input_entry(a.data_path, resolve_out(a.data_path))}};
  write_manifest(out / "manifest.json", manifest);

  const double mse = total_steps ? total_sq / double(total_steps) : 0.0;
  std::cout << "evaluated " << ds.paths.size() << " paths: mse " << mse << " MPa^2, rmse "
            << std::sqrt(mse) << " MPa\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physically recurrent neural network surrogate toolkit"};
  app.set_version_flag("--version", std::string(prnn::kToolName) + " " + prnn::kToolVersion);
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* cmd_gen = app.add_subcommand("gen-data", "generate strain paths and teacher responses");
  cmd_gen->add_option("--config", gen.config_path, "key = value config file");
  cmd_gen->add_option("--kind", gen.kind, "gp | prop-fund | prop-rand")->required();
  cmd_gen->add_option("--n", gen.n, "number of paths")->required();
  cmd_gen->add_option("--cycles", gen.cycles, "unloading cycles for proportional paths (0|1|2)");
  cmd_gen->add_option("--seed", gen.seed, "base RNG seed");
  cmd_gen->add_option("--out", gen.out, "output dataset file (JSON lines)")->required();
  cmd_gen->add_option("--steps", gen.steps, "override the per-path step count");
  cmd_gen->add_flag("--no-damage", gen.no_damage, "drop the teacher damage latents");

  TrainArgs tr;
  auto* cmd_train = app.add_subcommand("train", "train a PRNN on a dataset");
  cmd_train->add_option("--config", tr.config_path, "key = value config file");
  cmd_train->add_option("--arch", tr.arch, "prnn1 | prnn2 | prnn3")->required();
  cmd_train->add_option("--bulk", tr.bulk, "bulk points")->required();
  cmd_train->add_option("--coh", tr.coh, "cohesive points")->required();
  cmd_train->add_option("--seed", tr.seed, "init + shuffle seed");
  cmd_train->add_option("--train", tr.train_path, "training dataset")->required();
  cmd_train->add_option("--val", tr.val_path, "validation dataset")->required();
  cmd_train->add_option("--out", tr.out_dir, "output directory")->required();
  cmd_train->add_flag("--leaky", tr.leaky, "leaky cohesive-input activation (prnn2/prnn3)");
  cmd_train->add_option("--epochs", tr.epochs, "override train.max_epochs");
  cmd_train->add_option("--lr", tr.lr, "override train.learning_rate");
  cmd_train->add_option("--batch", tr.batch, "override train.batch_size");
  cmd_train->add_option("--patience", tr.patience, "override train.patience");
  cmd_train->add_option("--threads", tr.threads, "worker threads (0 = all cores)");

  SelectArgs sel;
  auto* cmd_select = app.add_subcommand("select", "layer-size / training-size model selection");
  cmd_select->add_option("--config", sel.config_path, "key = value config file");
  cmd_select->add_option("--arch", sel.arch, "prnn1 | prnn2 | prnn3")->required();
  cmd_select->add_option("--train", sel.train_path, "training dataset")->required();
  cmd_select->add_option("--val", sel.val_path, "validation dataset")->required();
  cmd_select->add_option("--layers", sel.layers, "comma list of bulk+cohesive sizes, e.g. 4+1,8+2");
  cmd_select->add_option("--train-sizes", sel.train_sizes, "comma list of training path counts");
  cmd_select->add_option("--inits", sel.inits, "restarts per grid cell");
  cmd_select->add_option("--seed", sel.seed, "base seed");
  cmd_select->add_option("--out", sel.out_dir, "output directory")->required();
  cmd_select->add_flag("--leaky", sel.leaky, "leaky cohesive-input activation");
  cmd_select->add_option("--epochs", sel.epochs, "override train.max_epochs");
  cmd_select->add_option("--threads", sel.threads, "worker threads");

  EvalArgs ev;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  cmd_eval->add_option("--checkpoint", ev.checkpoint_path, "checkpoint JSON")->required();
  cmd_eval->add_option("--data", ev.data_path, "dataset to evaluate on")->required();
  cmd_eval->add_option("--out", ev.out_dir, "output directory")->required();
  cmd_eval->add_option("--threads", ev.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmd_gen->parsed()) return run_gen_data(gen);
    if (cmd_train->parsed()) return run_train(tr);
    if (cmd_select->parsed()) return run_select(sel);
    if (cmd_eval->parsed()) return run_eval(ev);
    return kExitConfig;
  } catch (const prnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const prnn::NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

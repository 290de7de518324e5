#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prnn/material.hpp"
#include "prnn/strain_path.hpp"
#include "prnn/util.hpp"

namespace prnn {

// One strain path with its homogenized stress response and, optionally, the
// per-point damage latents of the generator.
struct DatasetPath {
  int id = 0;
  StrainPath path;
  std::vector<Eigen::Vector3d> stresses;
  std::vector<Eigen::VectorXd> damage;  // empty when latents are dropped
};

struct Dataset {
  BulkProps bulk_props;
  CzmProps czm_props;
  std::string teacher_hash;
  std::vector<DatasetPath> paths;
};

namespace detail {

inline void append_vec(std::string& out, const Eigen::Ref<const Eigen::VectorXd>& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_g17(v[i]);
  }
  out += ']';
}

template <class Series>
void append_series(std::string& out, const Series& series) {
  out += '[';
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (t) out += ',';
    append_vec(out, series[t]);
  }
  out += ']';
}

}  // namespace detail

// JSON-lines serialization: one header object, then one path object per line.
// Floats carry 17 significant digits so load/save round-trips bit-exactly.
inline std::string dataset_to_jsonl(const Dataset& ds) {
  std::string out;
  out += "{\"format\":\"prnn-dataset\",\"version\":1,\"teacher_hash\":\"" + ds.teacher_hash +
         "\",\"material\":{\"youngs_modulus\":" + format_g17(ds.bulk_props.youngs_modulus) +
         ",\"poisson_ratio\":" + format_g17(ds.bulk_props.poisson_ratio) +
         ",\"yield_stress\":" + format_g17(ds.bulk_props.yield_stress) +
         ",\"hardening_modulus\":" + format_g17(ds.bulk_props.hardening_modulus) +
         "},\"czm\":{\"normal_strength\":" + format_g17(ds.czm_props.normal_strength) +
         ",\"shear_strength\":" + format_g17(ds.czm_props.shear_strength) +
         ",\"g_ic\":" + format_g17(ds.czm_props.g_ic) +
         ",\"g_iic\":" + format_g17(ds.czm_props.g_iic) +
         ",\"eta\":" + format_g17(ds.czm_props.eta) +
         ",\"penalty_stiffness\":" + format_g17(ds.czm_props.penalty_stiffness) +
         "},\"units\":{\"stress\":\"MPa\",\"strain\":\"-\",\"jump\":\"mm\"}}\n";
  for (const auto& p : ds.paths) {
    out += "{\"id\":" + std::to_string(p.id) + ",\"provenance\":\"" +
           to_string(p.path.provenance) + "\",\"seed\":" + std::to_string(p.path.seed) +
           ",\"cycles\":" + std::to_string(p.path.cycles) + ",\"config\":" +
           nlohmann::json(p.path.config_echo).dump() + ",\"strains\":";
    detail::append_series(out, p.path.steps);
    out += ",\"stresses\":";
    detail::append_series(out, p.stresses);
    if (!p.damage.empty()) {
      out += ",\"damage\":";
      detail::append_series(out, p.damage);
    }
    out += "}\n";
  }
  return out;
}

inline void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  atomic_write_file(path, dataset_to_jsonl(ds));
}

inline Dataset dataset_from_jsonl(const std::string& text) {
  Dataset ds;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (!have_header) {
      if (j.value("format", "") != "prnn-dataset")
        throw ConfigError("dataset: missing prnn-dataset header line");
      if (j.value("version", 0) != 1) throw ConfigError("dataset: unsupported version");
      ds.teacher_hash = j.value("teacher_hash", "");
      const auto& m = j.at("material");
      ds.bulk_props.youngs_modulus = m.at("youngs_modulus").get<double>();
      ds.bulk_props.poisson_ratio = m.at("poisson_ratio").get<double>();
      ds.bulk_props.yield_stress = m.at("yield_stress").get<double>();
      ds.bulk_props.hardening_modulus = m.at("hardening_modulus").get<double>();
      const auto& c = j.at("czm");
      ds.czm_props.normal_strength = c.at("normal_strength").get<double>();
      ds.czm_props.shear_strength = c.at("shear_strength").get<double>();
      ds.czm_props.g_ic = c.at("g_ic").get<double>();
      ds.czm_props.g_iic = c.at("g_iic").get<double>();
      ds.czm_props.eta = c.at("eta").get<double>();
      ds.czm_props.penalty_stiffness = c.at("penalty_stiffness").get<double>();
      have_header = true;
      continue;
    }
    DatasetPath p;
    p.id = j.at("id").get<int>();
    p.path.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    p.path.seed = j.at("seed").get<std::uint64_t>();
    p.path.cycles = j.value("cycles", 0);
    p.path.config_echo = j.value("config", "");
    for (const auto& s : j.at("strains"))
      p.path.steps.emplace_back(s[0].get<double>(), s[1].get<double>(), s[2].get<double>());
    for (const auto& s : j.at("stresses"))
      p.stresses.emplace_back(s[0].get<double>(), s[1].get<double>(), s[2].get<double>());
    if (j.contains("damage")) {
      for (const auto& s : j.at("damage")) {
        Eigen::VectorXd d(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) d[k] = s[k].get<double>();
        p.damage.push_back(std::move(d));
      }
    }
    if (p.stresses.size() != p.path.steps.size())
      throw ConfigError("dataset: strain/stress series length mismatch on path " +
                        std::to_string(p.id));
    ds.paths.push_back(std::move(p));
  }
  if (!have_header) throw ConfigError("dataset: empty file");
  return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_jsonl(read_file(path));
}

}  // namespace prnn

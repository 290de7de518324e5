#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "prnn/checkpoint.hpp"
#include "prnn/config.hpp"
#include "prnn/dataset.hpp"
#include "prnn/teacher.hpp"

using Catch::Matchers::WithinRel;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("prnn_test_" + name);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = prnn::Config::parse(
      "# material block\n"
      "material.youngs_modulus = 3130\n"
      "material.poisson_ratio=0.37  # inline comment\n"
      "\n"
      "train.batch_size = 8\n"
      "name = teacher-a\n");
  REQUIRE(cfg.get_double("material.youngs_modulus", 0) == 3130.0);
  REQUIRE(cfg.get_double("material.poisson_ratio", 0) == 0.37);
  REQUIRE(cfg.get_int("train.batch_size", 0) == 8);
  REQUIRE(cfg.get_string("name", "") == "teacher-a");
  REQUIRE(cfg.get_double("missing", 1.5) == 1.5);
  REQUIRE_FALSE(cfg.has("missing"));

  REQUIRE_THROWS_AS(prnn::Config::parse("no equals sign here\n"), prnn::ConfigError);
  REQUIRE_THROWS_AS(prnn::Config::parse("= 5\n"), prnn::ConfigError);
  REQUIRE_THROWS_AS(prnn::Config::parse("x = abc\n").get_double("x", 0), prnn::ConfigError);
}

TEST_CASE("format_g17 round-trips doubles exactly") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> du(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = du(rng) * std::pow(10.0, int(rng() % 30) - 15);
    REQUIRE(std::stod(prnn::format_g17(x)) == x);
  }
  REQUIRE(std::stod(prnn::format_g17(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("dataset JSONL round-trip is bit-exact") {
  prnn::TeacherConfig cfg;
  cfg.n_bulk = 4;
  cfg.n_cohesive = 1;
  cfg.rng_seed = 77;
  const auto teacher = prnn::teacher_build(cfg);
  prnn::GpConfig gp;
  gp.n_steps = 12;
  const prnn::GpSampler sampler(gp);
  std::vector<prnn::StrainPath> paths;
  for (int i = 0; i < 3; ++i) paths.push_back(sampler.sample(prnn::derive_seed(55, i)));
  const auto ds = prnn::gen_dataset(teacher, paths, 1);

  const std::string text = prnn::dataset_to_jsonl(ds);
  const auto loaded = prnn::dataset_from_jsonl(text);
  REQUIRE(prnn::dataset_to_jsonl(loaded) == text);

  REQUIRE(loaded.paths.size() == ds.paths.size());
  REQUIRE(loaded.teacher_hash == teacher.hash);
  REQUIRE(loaded.bulk_props.youngs_modulus == cfg.bulk_props.youngs_modulus);
  for (std::size_t i = 0; i < ds.paths.size(); ++i) {
    REQUIRE(loaded.paths[i].path.seed == ds.paths[i].path.seed);
    REQUIRE(loaded.paths[i].path.provenance == ds.paths[i].path.provenance);
    for (std::size_t t = 0; t < ds.paths[i].stresses.size(); ++t) {
      REQUIRE(loaded.paths[i].path.steps[t] == ds.paths[i].path.steps[t]);
      REQUIRE(loaded.paths[i].stresses[t] == ds.paths[i].stresses[t]);
      REQUIRE(loaded.paths[i].damage[t] == ds.paths[i].damage[t]);
    }
  }

  SECTION("file save/load through the atomic writer") {
    const auto p = temp_file("ds.jsonl");
    prnn::save_dataset(p, ds);
    const auto from_file = prnn::load_dataset(p);
    REQUIRE(prnn::dataset_to_jsonl(from_file) == text);
    std::filesystem::remove(p);
  }

  SECTION("empty dataset is valid") {
    prnn::Dataset empty;
    empty.teacher_hash = "none";
    const std::string t = prnn::dataset_to_jsonl(empty);
    const auto back = prnn::dataset_from_jsonl(t);
    REQUIRE(back.paths.empty());
    REQUIRE(prnn::dataset_to_jsonl(back) == t);
  }

  SECTION("malformed input rejected") {
    REQUIRE_THROWS_AS(prnn::dataset_from_jsonl(""), prnn::ConfigError);
    REQUIRE_THROWS_AS(prnn::dataset_from_jsonl("{\"format\":\"something-else\"}\n"),
                      prnn::ConfigError);
  }
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  prnn::Checkpoint ck;
  ck.model.params = prnn::NetworkParams::init(prnn::Architecture::Prnn3, {4, 1}, 99, true);
  ck.init_seed = 99;
  ck.train_config.learning_rate = 2.5e-4;
  ck.train_config.rng_seed = 1234567890123ull;
  ck.opt_state = prnn::AdamState(ck.model.params.parameter_count());
  ck.opt_state.m.setRandom();
  ck.opt_state.v = ck.opt_state.v.array() + 0.5;
  ck.opt_state.step_count = 321;

  const std::string text = prnn::checkpoint_to_json(ck);
  const auto loaded = prnn::checkpoint_from_json(text);
  REQUIRE(prnn::checkpoint_to_json(loaded) == text);
  REQUIRE(loaded.model.params.flatten() == ck.model.params.flatten());
  REQUIRE(loaded.opt_state.m == ck.opt_state.m);
  REQUIRE(loaded.opt_state.step_count == 321);
  REQUIRE(loaded.train_config.rng_seed == ck.train_config.rng_seed);
  REQUIRE(loaded.model.params.leaky_cohesive);

  SECTION("file round-trip") {
    const auto p = temp_file("ck.json");
    prnn::save_checkpoint(p, ck);
    const auto from_file = prnn::load_checkpoint(p);
    REQUIRE(prnn::checkpoint_to_json(from_file) == text);
    std::filesystem::remove(p);
  }

  SECTION("wrong format or version rejected") {
    REQUIRE_THROWS_AS(prnn::checkpoint_from_json("{\"format\":\"x\"}"), prnn::ConfigError);
    auto j = nlohmann::json::parse(text);
    j["version"] = 2;
    REQUIRE_THROWS_AS(prnn::checkpoint_from_json(j.dump()), prnn::ConfigError);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include <Eigen/Geometry>

#include "prnn/gp_sampler.hpp"
#include "prnn/strain_path.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using Eigen::Vector3d;

TEST_CASE("gp_covariance kernel values") {
  prnn::GpConfig cfg;
  cfg.variance = 1.667e-4;
  cfg.length_scale = 200.0;
  cfg.n_steps = 100;

  REQUIRE_THAT(prnn::gp_covariance(5, 5, cfg), WithinRel(1.667e-4, 1e-12));
  REQUIRE_THAT(prnn::gp_covariance(0, 200, cfg), WithinRel(1.667e-4 * std::exp(-0.5), 1e-12));
  REQUIRE_THAT(prnn::gp_covariance(0, 200, cfg), WithinRel(1.0110866097409598e-4, 1e-12));

  SECTION("monotone decay with lag") {
    double prev = prnn::gp_covariance(0, 0, cfg);
    for (int lag = 1; lag < 2000; lag += 50) {
      const double k = prnn::gp_covariance(0, lag, cfg);
      REQUIRE(k < prev);
      prev = k;
    }
    REQUIRE(prnn::gp_covariance(0, 5000, cfg) < 1e-100);
  }

  SECTION("stationarity: depends only on |i-j|") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> di(0, 10000);
    for (int rep = 0; rep < 100; ++rep) {
      const int i = di(rng), j = di(rng), shift = di(rng);
      REQUIRE(prnn::gp_covariance(i, j, cfg) == prnn::gp_covariance(i + shift, j + shift, cfg));
    }
  }
}

TEST_CASE("gp_sample determinism and degenerate variance") {
  prnn::GpConfig cfg;
  cfg.n_steps = 50;
  cfg.rng_seed = 1234;

  const auto a = prnn::gp_sample(cfg);
  const auto b = prnn::gp_sample(cfg);
  REQUIRE(a.steps.size() == 50);
  for (std::size_t t = 0; t < a.steps.size(); ++t) REQUIRE(a.steps[t] == b.steps[t]);

  SECTION("vanishing variance collapses to the mean") {
    cfg.variance = 1e-20;
    cfg.mean = Vector3d(1e-3, -2e-3, 0.0);
    const auto p = prnn::gp_sample(cfg);
    for (const auto& s : p.steps) {
      REQUIRE_THAT(s[0], WithinAbs(1e-3, 1e-8));
      REQUIRE_THAT(s[1], WithinAbs(-2e-3, 1e-8));
      REQUIRE_THAT(s[2], WithinAbs(0.0, 1e-8));
    }
  }
}

TEST_CASE("gp_sample per-step marginal variance matches the kernel") {
  prnn::GpConfig cfg;
  cfg.n_steps = 60;
  const prnn::GpSampler sampler(cfg);
  const int n_paths = 3000;
  std::vector<double> sum(cfg.n_steps, 0.0), sum_sq(cfg.n_steps, 0.0);
  for (int p = 0; p < n_paths; ++p) {
    const auto path = sampler.sample(prnn::derive_seed(99, p));
    for (int t = 0; t < cfg.n_steps; ++t) {
      sum[t] += path.steps[t][0];
      sum_sq[t] += path.steps[t][0] * path.steps[t][0];
    }
  }
  for (int t = 0; t < cfg.n_steps; t += 7) {
    const double mean = sum[t] / n_paths;
    const double var = sum_sq[t] / n_paths - mean * mean;
    REQUIRE_THAT(var, WithinRel(cfg.variance, 0.10));
  }
}

TEST_CASE("fundamental_directions") {
  const auto dirs = prnn::fundamental_directions();
  REQUIRE(dirs.size() == 18);
  for (const auto& d : dirs) REQUIRE_THAT(d.norm(), WithinAbs(1.0, 1e-12));

  SECTION("contains pure tension and compression") {
    bool tension = false, compression = false;
    for (const auto& d : dirs) {
      if ((d - Vector3d(1, 0, 0)).norm() < 1e-14) tension = true;
      if ((d - Vector3d(-1, 0, 0)).norm() < 1e-14) compression = true;
    }
    REQUIRE(tension);
    REQUIRE(compression);
  }

  SECTION("pairwise distinct") {
    for (std::size_t i = 0; i < dirs.size(); ++i)
      for (std::size_t j = i + 1; j < dirs.size(); ++j)
        REQUIRE((dirs[i] - dirs[j]).norm() > 1e-6);
  }
}

TEST_CASE("random_direction") {
  const auto d = prnn::random_direction(7);
  REQUIRE_THAT(d.norm(), WithinAbs(1.0, 1e-12));
  REQUIRE(d == prnn::random_direction(7));
  REQUIRE((d - prnn::random_direction(8)).norm() > 1e-8);

  SECTION("isotropy of the component means") {
    const int n = 100000;
    Vector3d mean = Vector3d::Zero();
    for (int i = 0; i < n; ++i) mean += prnn::random_direction(prnn::derive_seed(5, i));
    mean /= n;
    for (int c = 0; c < 3; ++c) REQUIRE_THAT(mean[c], WithinAbs(0.0, 0.01));
  }
}

TEST_CASE("magnitude_series") {
  SECTION("monotonic ramp") {
    const auto m = prnn::magnitude_series(5, 1.0, {});
    REQUIRE(m == std::vector<double>{1, 2, 3, 4, 5});
  }

  SECTION("one unloading window") {
    const auto m = prnn::magnitude_series(6, 1.0, {{2, 2}});
    REQUIRE(m == std::vector<double>{1, 2, 1, 0, 1, 2});
  }

  SECTION("two disjoint windows resume the loading slope") {
    const auto m = prnn::magnitude_series(12, 1.0, {{3, 2}, {8, 2}});
    REQUIRE(m == std::vector<double>{1, 2, 3, 2, 1, 2, 3, 4, 3, 2, 3, 4});
  }

  SECTION("overlapping windows rejected") {
    REQUIRE_THROWS_AS(prnn::magnitude_series(10, 1.0, {{2, 3}, {4, 2}}), prnn::ConfigError);
  }

  SECTION("negative magnitude rejected") {
    REQUIRE_THROWS_AS(prnn::magnitude_series(6, 1.0, {{0, 3}}), prnn::ConfigError);
  }
}

TEST_CASE("proportional_path") {
  prnn::ProportionalConfig cfg;
  cfg.direction = Vector3d(1, 0, 0);
  cfg.step_size = 1.67e-3;
  cfg.kind = prnn::MagnitudeKind::Monotonic;
  cfg.n_steps = 10;

  SECTION("pure ramp along the axis") {
    const auto p = prnn::proportional_path(cfg, prnn::Provenance::ProportionalFundamental, 0);
    REQUIRE(p.steps.size() == 10);
    for (int t = 0; t < 10; ++t) {
      REQUIRE_THAT(p.steps[t][0], WithinRel((t + 1) * cfg.step_size, 1e-12));
      REQUIRE(p.steps[t][1] == 0.0);
      REQUIRE(p.steps[t][2] == 0.0);
    }
  }

  SECTION("fixed increment magnitude and rank-1 structure") {
    cfg.direction = prnn::random_direction(21);
    cfg.kind = prnn::MagnitudeKind::OneCycle;
    cfg.n_steps = 30;
    const auto p = prnn::proportional_path(cfg, prnn::Provenance::ProportionalRandom, 21);
    REQUIRE(p.cycles == 1);
    Vector3d prev = Vector3d::Zero();
    for (const auto& s : p.steps) {
      REQUIRE_THAT((s - prev).norm(), WithinRel(cfg.step_size, 1e-10));
      // every step is a scalar multiple of the direction
      REQUIRE_THAT(s.cross(cfg.direction).norm(), WithinAbs(0.0, 1e-12));
      prev = s;
    }
  }

  SECTION("non-unit direction rejected") {
    cfg.direction = Vector3d(1, 1, 0);
    REQUIRE_THROWS_AS(prnn::proportional_path(cfg, prnn::Provenance::ProportionalRandom, 0),
                      prnn::ConfigError);
  }
}

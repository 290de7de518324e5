#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "prnn/network.hpp"

#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using Eigen::Vector2d;
using Eigen::Vector3d;
using prnn::Architecture;

namespace {

prnn::PrnnModel random_model(Architecture arch, int nb, int nc, std::uint64_t seed,
                             bool leaky = false) {
  prnn::PrnnModel m;
  m.params = prnn::NetworkParams::init(arch, {nb, nc}, seed, leaky);
  return m;
}

prnn::StrainPath make_path(std::vector<Vector3d> steps) {
  prnn::StrainPath p;
  p.steps = std::move(steps);
  return p;
}

}  // namespace

TEST_CASE("encode is the bias-free linear map") {
  auto m = random_model(Architecture::Prnn1, 2, 1, 3);
  Eigen::VectorXd bulk, coh;

  SECTION("zero strain maps to zero local inputs") {
    prnn::encode(m.params, Vector3d::Zero(), bulk, coh);
    REQUIRE(bulk.isZero(0.0));
    REQUIRE(coh.isZero(0.0));
  }

  SECTION("identity blocks replicate the macro strain") {
    m.params.w_eps_bulk << Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity();
    const Vector3d eps(0.1, -0.2, 0.3);
    prnn::encode(m.params, eps, bulk, coh);
    REQUIRE(Vector3d(bulk.head<3>()) == eps);
    REQUIRE(Vector3d(bulk.tail<3>()) == eps);
  }

  SECTION("random weights match the loop mat-vec oracle") {
    const Vector3d eps(1e-3, 2e-3, -5e-4);
    prnn::encode(m.params, eps, bulk, coh);
    const Eigen::VectorXd ref_b = oracle::matvec(m.params.w_eps_bulk, eps);
    const Eigen::VectorXd ref_c = oracle::matvec(m.params.w_eps_coh, eps);
    REQUIRE_THAT((bulk - ref_b).norm(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT((coh - ref_c).norm(), WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("leaky cohesive activation branches") {
  REQUIRE(prnn::leaky_normal(0.1, 2.0, 0.1) == 0.0);
  REQUIRE_THAT(prnn::leaky_normal(0.3, 2.0, 0.1), WithinRel(0.4, 1e-14));
  REQUIRE_THAT(prnn::leaky_normal(0.0, 2.0, 0.1), WithinRel(0.01 * 2.0 * -0.1, 1e-14));
  REQUIRE(prnn::leaky_shear(0.0, 1.0, 0.1) == 0.0);
  REQUIRE_THAT(prnn::leaky_shear(0.3, 1.0, 0.1), WithinRel(0.3 - 0.1 + 0.001, 1e-14));
  REQUIRE_THAT(prnn::leaky_shear(-0.3, 1.0, 0.1), WithinRel(-0.3 + 0.1 - 0.001, 1e-14));
  // continuity at the junctions
  REQUIRE_THAT(prnn::leaky_shear(0.1 + 1e-15, 1.0, 0.1), WithinAbs(0.001, 1e-12));
  REQUIRE_THAT(prnn::leaky_shear(0.1 - 1e-15, 1.0, 0.1), WithinAbs(0.001, 1e-12));
}

TEST_CASE("cohesive_input in leaky mode applies the activation on encoder rows") {
  auto m = random_model(Architecture::Prnn3, 1, 1, 5, /*leaky=*/true);
  m.params.w_eps_coh.setZero();
  m.params.w_eps_coh(0, 0) = 1.0;  // normal neuron reads exx
  m.params.w_eps_coh(1, 2) = 1.0;  // shear neuron reads gxy
  const Vector3d eps(0.3, 0.0, 0.0);
  const Eigen::VectorXd jumps = prnn::cohesive_input(m.params, eps);
  const double w = prnn::softplus(m.params.raw_act_w[0]);
  const double b = prnn::softplus(m.params.raw_act_b[0]);
  REQUIRE_THAT(jumps[0], WithinRel(prnn::leaky_normal(0.3, w, b), 1e-14));
  const double ws = prnn::softplus(m.params.raw_act_w[1]);
  const double bs = prnn::softplus(m.params.raw_act_b[1]);
  REQUIRE_THAT(jumps[1], WithinRel(prnn::leaky_shear(0.0, ws, bs), 1e-14));
}

TEST_CASE("bulk_input_prnn2 superposes strain and damage terms") {
  auto m = random_model(Architecture::Prnn2, 1, 1, 9);

  SECTION("virgin interface reduces to the encoder") {
    const Vector3d eps(2e-3, 1e-3, 0.0);
    const Eigen::VectorXd out = prnn::bulk_input_prnn2(m.params, eps, Eigen::VectorXd::Zero(1));
    REQUIRE_THAT((out - m.params.w_eps_bulk * eps).norm(), WithinAbs(0.0, 1e-15));
  }

  SECTION("pure damage drive") {
    m.params.w_damage << 0.1, 0.0, 0.0;
    Eigen::VectorXd d(1);
    d << 1.0;
    const Eigen::VectorXd out = prnn::bulk_input_prnn2(m.params, Vector3d::Zero(), d);
    REQUIRE_THAT(out[0], WithinRel(0.1, 1e-14));
    REQUIRE(out[1] == 0.0);
    REQUIRE(out[2] == 0.0);
  }

  SECTION("random inputs match the sum of two mat-vec oracles") {
    const Vector3d eps(1e-3, -2e-3, 4e-4);
    Eigen::VectorXd d(1);
    d << 0.37;
    const Eigen::VectorXd out = prnn::bulk_input_prnn2(m.params, eps, d);
    const Eigen::VectorXd ref =
        oracle::matvec(m.params.w_eps_bulk, eps) + oracle::matvec(m.params.w_damage, d);
    REQUIRE_THAT((out - ref).norm(), WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("bulk_input_prnn3 amplifier") {
  auto m = random_model(Architecture::Prnn3, 1, 1, 13);

  SECTION("zero damage amplifies by softplus(1)") {
    const Vector3d eps(1e-3, 2e-3, 3e-3);
    const Eigen::VectorXd out = prnn::bulk_input_prnn3(m.params, eps, Eigen::VectorXd::Zero(1));
    const Eigen::VectorXd base = m.params.w_eps_bulk * eps;
    for (int i = 0; i < 3; ++i) REQUIRE_THAT(out[i], WithinRel(1.3132616875182228 * base[i], 1e-14));
  }

  SECTION("zero strain gives zero bulk input regardless of damage") {
    Eigen::VectorXd d(1);
    d << 0.9;
    const Eigen::VectorXd out = prnn::bulk_input_prnn3(m.params, Vector3d::Zero(), d);
    REQUIRE(out.isZero(0.0));
  }

  SECTION("amplifier argument of zero gives ln 2") {
    m.params.w_damage.setConstant(-1.0);
    Eigen::VectorXd d(1);
    d << 1.0;  // 1 + w_d * d = 0
    const Vector3d eps(2e-3, 0.0, 0.0);
    const Eigen::VectorXd base = m.params.w_eps_bulk * eps;
    const Eigen::VectorXd out = prnn::bulk_input_prnn3(m.params, eps, d);
    for (int i = 0; i < 3; ++i) REQUIRE_THAT(out[i], WithinRel(0.6931471805599453 * base[i], 1e-14));
  }
}

TEST_CASE("decode applies SoftPlus weights without bias") {
  auto m = random_model(Architecture::Prnn2, 2, 0, 17);

  SECTION("zero locals give zero output") {
    REQUIRE(prnn::decode(m.params, Eigen::VectorXd::Zero(6)) == Vector3d::Zero());
  }

  SECTION("all-zero raw weights give ln2 times the component sum") {
    m.params.raw_decoder.setZero();
    Eigen::VectorXd locals(6);
    locals << 1, 2, 3, 4, 5, 6;
    const Vector3d out = prnn::decode(m.params, locals);
    for (int c = 0; c < 3; ++c) REQUIRE_THAT(out[c], WithinRel(std::log(2.0) * 21.0, 1e-13));
  }

  SECTION("random weights match softplus-then-matvec oracle") {
    Eigen::VectorXd locals(6);
    locals << 0.3, -1.2, 0.5, 2.0, -0.7, 0.9;
    Eigen::MatrixXd eff = m.params.raw_decoder;
    for (Eigen::Index i = 0; i < eff.rows(); ++i)
      for (Eigen::Index j = 0; j < eff.cols(); ++j) eff(i, j) = oracle::softplus_ref(eff(i, j));
    const Eigen::VectorXd ref = oracle::matvec(eff, locals);
    const Vector3d out = prnn::decode(m.params, locals);
    REQUIRE_THAT((out - Vector3d(ref)).norm(), WithinAbs(0.0, 1e-12));
  }

  SECTION("dimension mismatch rejected") {
    REQUIRE_THROWS_AS(prnn::decode(m.params, Eigen::VectorXd::Zero(5)), std::invalid_argument);
  }
}

TEST_CASE("forward_step composition") {
  SECTION("zero strain at the first step leaves state untouched") {
    for (auto arch : {Architecture::Prnn1, Architecture::Prnn2, Architecture::Prnn3}) {
      auto m = random_model(arch, 2, 1, 23);
      prnn::NetworkState state(m.params.sizes);
      const Vector3d out = prnn::forward_step(m, Vector3d::Zero(), state);
      REQUIRE(out == Vector3d::Zero());
      REQUIRE(state.bulk[0].eq_plastic_strain == 0.0);
      REQUIRE(state.cohesive[0].damage == 0.0);
    }
  }

  SECTION("single bulk point with identity encoder and unit decoder is the elastic map") {
    prnn::PrnnModel m;
    m.params = prnn::NetworkParams::init(Architecture::Prnn2, {1, 0}, 1);
    m.params.w_eps_bulk = Eigen::Matrix3d::Identity();
    m.params.raw_decoder.setConstant(-40.0);  // softplus(-40) ~ 4e-18
    for (int c = 0; c < 3; ++c) m.params.raw_decoder(c, c) = prnn::softplus_inverse(1.0);
    const Vector3d eps(1e-3, -5e-4, 2e-4);  // small: elastic regime
    prnn::NetworkState state(m.params.sizes);
    const Vector3d out = prnn::forward_step(m, eps, state);
    const Vector3d ref = prnn::elastic_update(eps, m.bulk_props);
    REQUIRE_THAT((out - ref).norm(), WithinAbs(0.0, 1e-12 * ref.norm()));
  }

  SECTION("PRNN3 with zero damage coupling equals a damage-blind pass scaled by softplus(1)") {
    auto m = random_model(Architecture::Prnn3, 2, 1, 31);
    m.params.w_damage.setZero();
    // drive hard enough to create damage and plasticity
    const Vector3d eps(0.05, -0.02, 0.03);
    prnn::NetworkState state(m.params.sizes);
    Vector3d out;
    for (int t = 1; t <= 3; ++t) out = prnn::forward_step(m, eps * (t / 3.0), state);

    // independent damage-blind evaluation
    const double sp1 = prnn::softplus(1.0);
    std::vector<prnn::BulkState> bulk(2);
    Eigen::VectorXd stresses(6);
    for (int t = 1; t <= 3; ++t) {
      const Eigen::VectorXd local = sp1 * (m.params.w_eps_bulk * (eps * (t / 3.0)));
      for (int i = 0; i < 2; ++i) {
        const auto r = prnn::j2_update(local.segment<3>(3 * i), bulk[i], m.bulk_props);
        bulk[i] = r.state;
        stresses.segment<3>(3 * i) = r.stress;
      }
    }
    const Vector3d ref = prnn::decode(m.params, stresses);
    REQUIRE_THAT((out - ref).norm(), WithinAbs(0.0, 1e-12 * (1.0 + ref.norm())));
  }
}

TEST_CASE("forward_path properties") {
  SECTION("constant zero path predicts zero everywhere for all architectures") {
    for (auto arch : {Architecture::Prnn1, Architecture::Prnn2, Architecture::Prnn3}) {
      for (bool leaky : {false, true}) {
        if (leaky && arch == Architecture::Prnn1) continue;
        auto m = random_model(arch, 3, 1, 37, leaky);
        const auto pred = prnn::forward_path(m, make_path({Vector3d::Zero(), Vector3d::Zero(),
                                                           Vector3d::Zero()}));
        for (const auto& s : pred.stresses) REQUIRE(s == Vector3d::Zero());
      }
    }
  }

  SECTION("elastic paths are linear: doubling the path doubles the stresses") {
    auto m = random_model(Architecture::Prnn2, 2, 1, 41);
    // strains small against the onset jump (1.2e-6 mm through ~0.5-scale
    // encoder rows) keep every point elastic and undamaged
    std::vector<Vector3d> steps = {Vector3d(1e-8, 0, 0), Vector3d(1e-8, 1e-8, -1e-8),
                                   Vector3d(0, 2e-8, 1e-8)};
    auto doubled = steps;
    for (auto& s : doubled) s *= 2.0;
    const auto p1 = prnn::forward_path(m, make_path(steps));
    const auto p2 = prnn::forward_path(m, make_path(doubled));
    for (std::size_t t = 0; t < steps.size(); ++t)
      REQUIRE_THAT((p2.stresses[t] - 2.0 * p1.stresses[t]).norm(),
                   WithinAbs(0.0, 1e-12 * (1.0 + p1.stresses[t].norm())));
  }

  SECTION("load/unload below onset and yield retraces the loading branch") {
    auto m = random_model(Architecture::Prnn3, 2, 1, 43);
    std::vector<Vector3d> steps;
    const Vector3d dir(1e-8, 5e-9, -8e-9);
    for (int t = 1; t <= 5; ++t) steps.push_back(dir * t);
    for (int t = 4; t >= 1; --t) steps.push_back(dir * t);
    const auto pred = prnn::forward_path(m, make_path(steps));
    for (int t = 1; t <= 4; ++t) {
      const auto& up = pred.stresses[t - 1];
      const auto& down = pred.stresses[9 - t];
      REQUIRE(up == down);  // bit-identical: same strain, same state
    }
  }

  SECTION("state causality: truncated path reproduces the prefix") {
    auto m = random_model(Architecture::Prnn1, 2, 1, 47);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> du(-0.02, 0.02);
    std::vector<Vector3d> steps;
    for (int t = 0; t < 8; ++t) steps.emplace_back(du(rng), du(rng), du(rng));
    const auto full = prnn::forward_path(m, make_path(steps));
    auto prefix = steps;
    prefix.resize(5);
    const auto part = prnn::forward_path(m, make_path(prefix));
    for (int t = 0; t < 5; ++t) REQUIRE(full.stresses[t] == part.stresses[t]);
  }

  SECTION("PRNN3 revisit: unchanged state reproduces the stress bit-exactly") {
    auto m = random_model(Architecture::Prnn3, 2, 1, 53);
    // load far enough to damage, then cycle below the peak: the excursion is
    // elastic with frozen damage, so the revisited strain sees identical
    // (input, state) pairs and must reproduce the stress bit-for-bit
    const Vector3d peak(0.04, 0.01, -0.02);
    std::vector<Vector3d> steps;
    for (int t = 1; t <= 6; ++t) steps.push_back(peak * (t / 6.0));
    steps.push_back(peak * 0.95);  // t = 6: first elastic visit
    steps.push_back(peak * 0.90);
    steps.push_back(peak * 0.95);  // t = 8: revisit, state unchanged
    const auto pred = prnn::forward_path(m, make_path(steps), /*record_latents=*/true);
    REQUIRE(pred.latents[8].damage == pred.latents[6].damage);
    REQUIRE(pred.stresses[8] == pred.stresses[6]);
  }
}

TEST_CASE("decoder exposure of cohesive tractions") {
  SECTION("PRNN1 output reacts to the traction columns of the decoder") {
    auto m = random_model(Architecture::Prnn1, 1, 1, 61);
    const Vector3d eps(0.02, 0.0, 0.01);
    prnn::NetworkState s1(m.params.sizes);
    const Vector3d base = prnn::forward_step(m, eps, s1);
    auto m2 = m;
    m2.params.raw_decoder.col(3).array() += 1.0;  // first traction column
    prnn::NetworkState s2(m2.params.sizes);
    const Vector3d bumped = prnn::forward_step(m2, eps, s2);
    REQUIRE((base - bumped).norm() > 0.0);
  }

  SECTION("PRNN2/3 have no traction columns and the output is the bulk decode") {
    for (auto arch : {Architecture::Prnn2, Architecture::Prnn3}) {
      auto m = random_model(arch, 2, 1, 67);
      REQUIRE(m.params.raw_decoder.cols() == 6);  // 3*n_bulk only
      const Vector3d eps(0.03, -0.01, 0.02);
      prnn::NetworkState state(m.params.sizes);
      prnn::StepLatent latent;
      const Vector3d out = prnn::forward_step(m, eps, state, &latent);
      const Vector3d recomputed = prnn::decode(m.params, latent.bulk_stress);
      REQUIRE(out == recomputed);
    }
  }
}

TEST_CASE("zero map holds for random parameters of every architecture") {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    const auto arch = static_cast<Architecture>(rep % 3);
    const bool leaky = (rep % 2 == 0) && arch != Architecture::Prnn1;
    auto m = random_model(arch, 1 + int(rng() % 4), int(rng() % 3), rng(), leaky);
    const auto pred =
        prnn::forward_path(m, make_path({Vector3d::Zero(), Vector3d::Zero(), Vector3d::Zero()}));
    for (const auto& s : pred.stresses) REQUIRE(s == Vector3d::Zero());
  }
}

TEST_CASE("decoder positivity for extreme raw values") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> du(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) REQUIRE(prnn::softplus(du(rng)) > 0.0);
}

TEST_CASE("network params validation and round-trip") {
  auto p = prnn::NetworkParams::init(Architecture::Prnn3, {4, 1}, 5, true);
  REQUIRE_NOTHROW(p.validate());

  SECTION("flatten/unflatten is the identity") {
    const Eigen::VectorXd flat = p.flatten();
    auto q = p;
    q.w_eps_bulk.setZero();
    q.raw_act_b.setZero();
    q.unflatten(flat);
    REQUIRE(q.flatten() == flat);
  }

  SECTION("leaky PRNN1 rejected") {
    auto bad = prnn::NetworkParams::init(Architecture::Prnn1, {4, 1}, 5);
    bad.leaky_cohesive = true;
    REQUIRE_THROWS_AS(bad.validate(), prnn::ConfigError);
  }
}

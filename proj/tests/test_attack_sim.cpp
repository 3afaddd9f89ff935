#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linbp/attack_sim.hpp"
#include "oracles.hpp"

using namespace linbp;

TEST_CASE("clip basics and idempotence") {
  Vec center{0.0, 1.0, -1.0};
  Vec inside{0.1, 0.9, -1.2};
  CHECK(clip(inside, center, 0.25) == inside);

  Vec outside{0.5, 1.5, -1.5};
  CHECK(clip(outside, center, 0.25) == Vec{0.25, 1.25, -1.25});

  auto eng = oracle::engine(50);
  for (int k = 0; k < 100; ++k) {
    Vec c = oracle::random_vec(8, eng);
    Vec x0 = oracle::random_vec(8, eng);
    Vec once = clip(c, x0, 0.3);
    CHECK(clip(once, x0, 0.3) == once);
    for (std::size_t i = 0; i < once.size(); ++i)
      CHECK(std::fabs(once[i] - x0[i]) <= 0.3 + 1e-15);
  }
}

TEST_CASE("attack_step trivial cases") {
  auto eng = oracle::engine(51);
  TwoLayerModel m{oracle::random_matrix(6, 4, eng),
                  oracle::random_matrix(3, 6, eng)};
  Vec x0 = oracle::random_vec(4, eng);
  Vec xs = oracle::random_vec(4, eng);

  AttackConfig cfg;
  cfg.d1 = 4;
  cfg.eta = 0.0;
  CHECK(attack_step(m, x0, x0, xs, cfg) == x0);

  cfg.eta = 0.01;
  // x_t = x*: identical masks, zero residual, zero gradient
  Vec fixed = attack_step(m, xs, xs, xs, cfg);
  CHECK(fixed == xs);
}

TEST_CASE("attack_step equals the manual grad+normalize+clip composition") {
  auto eng = oracle::engine(52);
  for (int k = 0; k < 50; ++k) {
    TwoLayerModel m{oracle::random_matrix(6, 4, eng),
                    oracle::random_matrix(3, 6, eng)};
    Vec x0 = oracle::random_vec(4, eng);
    Vec xt = clip(oracle::random_vec(4, eng), x0, 0.25);
    Vec xs = oracle::random_vec(4, eng);
    AttackConfig cfg;
    cfg.eta = 0.05;
    cfg.eps = 0.25;
    cfg.normalize = NormalizeMode::Linf;
    cfg.mode = GradientMode::linbp();
    Vec got = attack_step(m, xt, x0, xs, cfg);
    Vec u = normalize_update(grad_x_linbp(m, xt, xs), NormalizeMode::Linf);
    Vec manual = xt;
    for (std::size_t i = 0; i < manual.size(); ++i) manual[i] -= cfg.eta * u[i];
    manual = clip(manual, x0, cfg.eps);
    // the library update may fuse multiply-add; allow one ulp of slack
    CHECK(oracle::max_abs_diff(got, manual) <= 1e-15);
  }
}

namespace {

AttackConfig small_config() {
  AttackConfig cfg;
  cfg.d1 = 12;
  cfg.d2 = 6;
  cfg.d3 = 4;
  cfg.eta = 0.01;
  cfg.eps = 0.25;
  cfg.steps = 8;
  cfg.trials = 3;
  cfg.seed = 99;
  cfg.record_iterates = true;
  return cfg;
}

}  // namespace

TEST_CASE("run_attack_sim with zero steps reports identical starting distances") {
  AttackConfig cfg = small_config();
  cfg.steps = 0;
  AttackSimResult res = run_attack_sim(cfg);
  REQUIRE(res.methods.size() == 2);
  for (std::size_t k = 0; k < cfg.trials; ++k)
    CHECK(res.trials[0][k].steps[0].l1_dist ==
          res.trials[1][k].steps[0].l1_dist);
}

TEST_CASE("run_attack_sim iterates satisfy the l-inf budget") {
  AttackConfig cfg = small_config();
  AttackSimResult res = run_attack_sim(cfg);
  for (const auto& arm : res.trials) {
    for (const Trajectory& traj : arm) {
      REQUIRE(traj.steps.size() == cfg.steps + 1);
      REQUIRE(traj.iterates.size() == cfg.steps + 1);
      const Vec& x0 = traj.iterates[0];
      for (const Vec& x : traj.iterates)
        for (std::size_t i = 0; i < x.size(); ++i)
          CHECK(std::fabs(x[i] - x0[i]) <= cfg.eps + 1e-12);
    }
  }
}

TEST_CASE("run_attack_sim paired arms consume identical draws") {
  AttackSimResult res = run_attack_sim(small_config());
  for (std::size_t k = 0; k < res.trials[0].size(); ++k) {
    CHECK(res.trials[0][k].draw_checksum == res.trials[1][k].draw_checksum);
    CHECK(res.trials[0][k].iterates[0] == res.trials[1][k].iterates[0]);
  }
  // distinct trials use distinct draws
  CHECK(res.trials[0][0].draw_checksum != res.trials[0][1].draw_checksum);
}

TEST_CASE("run_attack_sim is constant under eta = 0 without normalization") {
  AttackConfig cfg = small_config();
  cfg.eta = 0.0;
  AttackSimResult res = run_attack_sim(cfg);
  for (const auto& arm : res.trials)
    for (const Trajectory& traj : arm)
      for (const Vec& x : traj.iterates) CHECK(x == traj.iterates[0]);
}

TEST_CASE("run_attack_sim is deterministic for a fixed seed") {
  AttackConfig cfg = small_config();
  AttackSimResult a = run_attack_sim(cfg);
  AttackSimResult b = run_attack_sim(cfg);
  for (std::size_t mi = 0; mi < a.trials.size(); ++mi)
    for (std::size_t k = 0; k < a.trials[mi].size(); ++k) {
      CHECK(a.trials[mi][k].iterates == b.trials[mi][k].iterates);
      for (std::size_t s = 0; s < a.trials[mi][k].steps.size(); ++s) {
        CHECK(a.trials[mi][k].steps[s].l1_dist ==
              b.trials[mi][k].steps[s].l1_dist);
        CHECK(a.trials[mi][k].steps[s].grad_l2 ==
              b.trials[mi][k].steps[s].grad_l2);
      }
    }
}

TEST_CASE("run_attack_sim validates the config") {
  AttackConfig cfg = small_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(run_attack_sim(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.eps = 0.0;
  CHECK_THROWS_AS(run_attack_sim(cfg), std::invalid_argument);
}

TEST_CASE("run_attack_expected: linbp arm is a pure geometric contraction without clipping") {
  AttackConfig cfg;
  cfg.d1 = 20;
  cfg.d2 = 10;
  cfg.eta = 0.004;
  cfg.eps = 1e9;  // box never binds
  cfg.steps = 60;
  cfg.seed = 5;
  AttackExpectedResult res = run_attack_expected(cfg);
  REQUIRE(res.methods.size() == 2);
  REQUIRE(res.methods[1] == "linbp");
  const double rate = 1.0 - cfg.eta * cfg.d2 / 2.0;
  const Trajectory& lin = res.arms[1];
  double pow = 1.0;
  for (std::size_t t = 0; t <= cfg.steps; ++t) {
    for (std::size_t i = 0; i < cfg.d1; ++i) {
      const double want = res.x_star[i] + pow * (res.x0[i] - res.x_star[i]);
      CHECK(std::fabs(lin.iterates[t][i] - want) <= 1e-10);
    }
    pow *= rate;
  }
}

TEST_CASE("run_attack_expected: saturated coordinates stay on the bound") {
  AttackConfig cfg;  // paper defaults, clipping active
  cfg.steps = 120;
  cfg.seed = 3;
  AttackExpectedResult res = run_attack_expected(cfg);
  for (const Trajectory& arm : res.arms) {
    for (std::size_t i = 0; i < cfg.d1; ++i) {
      bool saturated = false;
      double value = 0.0;
      for (const Vec& x : arm.iterates) {
        if (saturated) {
          CHECK(x[i] == value);
        } else if (std::fabs(x[i] - res.x0[i]) == cfg.eps) {
          saturated = true;
          value = x[i];
        }
      }
    }
  }
}

TEST_CASE("run_attack_expected linbp trajectory is bitwise independent of d3") {
  AttackConfig cfg;
  cfg.steps = 40;
  cfg.seed = 11;
  AttackConfig other = cfg;
  other.d3 = 77;
  AttackExpectedResult a = run_attack_expected(cfg);
  AttackExpectedResult b = run_attack_expected(other);
  CHECK(a.arms[1].iterates == b.arms[1].iterates);
}

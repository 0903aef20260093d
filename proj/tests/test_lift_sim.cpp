#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "svlift/ergodics.hpp"
#include "svlift/errors.hpp"
#include "svlift/lift_sim.hpp"
#include "svlift/rng.hpp"
#include "svlift/riccati.hpp"

using namespace svlift;

namespace {

AffineModel heston1d(double sigma = 0.3) { return preset_rough_heston_1d(1.0, sigma, 0.75, 1.0, 1.0); }

// One OU component with every coefficient zero.
AffineModel null_model(double v0) {
  AffineModel m = AffineModel::zeros(1, 0, 1);
  m.kernel.alpha = {0.75};
  m.kernel.delta = 1.0;
  m.initial.v0 = {v0};
  return m;
}

SimConfig config(double horizon, std::size_t paths, std::vector<double> grid, std::size_t nodes = 64) {
  SimConfig c;
  c.dt = 1e-2;
  c.horizon = horizon;
  c.n_paths = paths;
  c.record_grid = std::move(grid);
  c.n_nodes = nodes;
  return c;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("init_state") {
  const Lift one(heston1d(), 32);
  const auto s = init_state(one);
  CHECK(s.t == 0.0);
  CHECK(total_mass(one, s) == std::vector<double>{1.0});
  CHECK(mass_norm(one, s) == 1.0);
  const Lift two(preset_rough_heston_2d(1.0, 0.3, -0.7, 0.75, 1.0, 0.04, 4.5), 32);
  CHECK(total_mass(two, init_state(two)) == std::vector<double>{0.04, 4.5});
  CHECK(init_state(two).U[kHestonPrice].size() == 1);
}

TEST_CASE("invalid models are rejected") {
  auto m = heston1d();
  m.kernel.alpha[0] = 0.4;
  CHECK_THROWS_AS(Lift(m, 16), DomainError);
}

TEST_CASE("null dynamics keep the initial value") {
  const Lift lift(null_model(1.7), 32);
  const auto ens = simulate_paths(lift, config(2.0, 5, {0.0, 1.0, 2.0}), 1);
  for (double v : ens.vbar) CHECK(v == 1.7);
}

TEST_CASE("factors decay exactly when the increment vanishes") {
  const Lift lift(null_model(0.0), 32);
  const auto plan = make_plan(lift, 0.05);
  auto s = init_state(lift);
  for (std::size_t j = 0; j < s.U[0].size(); ++j) s.U[0][j] = std::sin(1.0 + j);
  const auto before = s.U[0];
  step(lift, plan, s, {0.3});
  for (std::size_t j = 0; j < before.size(); ++j) CHECK(s.U[0][j] == plan.decay[0][j] * before[j]);
  CHECK(s.t == 0.05);
}

TEST_CASE("one step from the origin") {
  const Lift lift(heston1d(), 32);
  const double dt = 0.01, dw = 0.05;
  const auto plan = make_plan(lift, dt);
  auto s = init_state(lift);
  step(lift, plan, s, {dw});
  const double dx = -1.0 * dt + 0.3 * dw;
  const auto& m = lift.measures()[0];
  double expect = 1.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double a = (1.0 - std::exp(-m.nodes[j] * dt)) / (m.nodes[j] * dt);
    CHECK(s.U[0][j] == doctest::Approx(a * dx).epsilon(1e-14));
    expect += m.weights[j] * a * dx;
  }
  CHECK(total_mass(lift, s)[0] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("fused kernel matches repeated step() bitwise") {
  for (const auto& model : {heston1d(), preset_rough_heston_2d(1.0, 0.5, -0.7, 0.75, 1.0, 0.3, 0.0)}) {
    const Lift lift(model, 48);
    const auto cfg = config(1.0, 4, {0.0, 0.5, 1.0});
    const auto ens = simulate_paths(lift, cfg, 99);
    const auto plan = make_plan(lift, cfg.dt);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
      const rng::PathStream rs(99, rng::Stream::Paths, p);
      auto s = init_state(lift);
      std::vector<double> z(model.m);
      std::size_t k = 0;
      for (std::size_t n = 0; n <= 100; ++n) {
        if (n == 0 || n == 50 || n == 100) {
          const auto v = total_mass(lift, s);
          for (std::size_t i = 0; i < model.d; ++i) CHECK(v[i] == ens.value(p, k, i));
          CHECK(mass_norm(lift, s) == ens.norm_at(p, k));
          ++k;
        }
        if (n == 100) break;
        rs.normals(n, z.data(), z.size());
        for (double& x : z) x *= plan.sqrt_dt;
        step(lift, plan, s, z);
      }
    }
  }
}

TEST_CASE("parallel, serial and thread count agree bitwise") {
  const Lift lift(preset_rough_heston_2d(1.0, 0.5, -0.7, 0.75, 1.0, 0.3, 0.0), 32);
  auto cfg = config(2.0, 257, {0.5, 1.0, 2.0});
  const auto a = simulate_paths(lift, cfg, 5);
  const auto b = simulate_paths_serial(lift, cfg, 5);
  cfg.threads = 3;
  const auto c = simulate_paths(lift, cfg, 5);
  CHECK(same_bits(a.vbar, b.vbar));
  CHECK(same_bits(a.norm, b.norm));
  CHECK(same_bits(a.vbar, c.vbar));
  const auto d = simulate_paths(lift, cfg, 6);
  CHECK(!same_bits(a.vbar, d.vbar));
}

TEST_CASE("trajectory CSV is reproducible") {
  const Lift lift(heston1d(), 32);
  const auto cfg = config(1.0, 20, {0.0, 0.5, 1.0});
  std::ostringstream a, b;
  write_trajectories_csv(a, simulate_paths(lift, cfg, 11));
  write_trajectories_csv(b, simulate_paths(lift, cfg, 11));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("path_id,t,vbar_1,norm_estimate\n", 0) == 0);
}

TEST_CASE("noiseless paths follow the mean formula") {
  const Lift lift(heston1d(0.0), 128);
  SqrtParams p;
  double prev_err = 1.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    auto cfg = config(5.0, 1, {1.0, 5.0}, 128);
    cfg.dt = dt;
    const auto ens = simulate_paths(lift, cfg, 1);
    double err = 0.0;
    for (std::size_t k = 0; k < 2; ++k) err = std::max(err, std::abs(ens.value(0, k, 0) - expected_mass(p, ens.times[k])));
    CAPTURE(dt);
    CHECK(err < 2e-3);
    CHECK(err <= prev_err);
    prev_err = err;
  }
}

TEST_CASE("halving dt moves the mean by less than three standard errors") {
  const Lift lift(heston1d(), 64);
  auto coarse = config(1.0, 10000, {1.0}, 64);
  auto fine = coarse;
  fine.dt = 0.005;
  const auto a = sample_mean(simulate_paths(lift, coarse, 21).column(0, 0));
  const auto b = sample_mean(simulate_paths(lift, fine, 22).column(0, 0));
  CHECK(std::abs(a.mean - b.mean) < 3.0 * std::hypot(a.se, b.se));
}

TEST_CASE("negative excursions shrink with dt") {
  auto fraction_below = [](const Lift& lift, double dt, double level_per_dt, double level) {
    SimConfig cfg = config(2.0, 4000, {}, 64);
    cfg.dt = dt;
    for (int k = 1; k <= 20; ++k) cfg.record_grid.push_back(0.1 * k);
    const auto ens = simulate_paths(lift, cfg, 8);
    const double eps = level_per_dt * dt + level;
    std::size_t below = 0;
    for (double v : ens.vbar) below += v < -eps;
    return static_cast<double>(below) / static_cast<double>(ens.vbar.size());
  };
  // acceptance parameters: nothing falls below the clamp scale 10 dt beta
  const Lift calm(heston1d(), 64);
  for (double dt : {0.02, 0.01, 0.005}) CHECK(fraction_below(calm, dt, 10.0, 0.0) == 0.0);
  // large vol of vol: excursions below a fixed level die out as dt shrinks
  const Lift wild(preset_rough_heston_1d(1.0, 1.0, 0.75, 1.0, 1.0), 64);
  double prev = 1.0;
  for (double dt : {0.05, 0.02, 0.01, 0.005}) {
    const double f = fraction_below(wild, dt, 0.0, 0.01);
    CAPTURE(dt);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("mass_norm bounds the total mass") {
  const Lift lift(heston1d(), 32);
  auto s = init_state(lift);
  for (std::size_t j = 0; j < s.U[0].size(); ++j) s.U[0][j] = 0.25;
  CHECK(mass_norm(lift, s) == doctest::Approx(total_mass(lift, s)[0]).epsilon(1e-14));
  for (std::size_t j = 0; j < s.U[0].size(); ++j) s.U[0][j] = (j % 2 ? 1.0 : -1.3);
  CHECK(mass_norm(lift, s) >= std::abs(total_mass(lift, s)[0]));
}

TEST_CASE("restart") {
  SUBCASE("noiseless zero-drift restart decays each factor") {
    const Lift lift(null_model(0.4), 32);
    auto s = init_state(lift);
    s.t = 3.0;
    for (std::size_t j = 0; j < s.U[0].size(); ++j) s.U[0][j] = std::cos(0.3 * j);
    auto cfg = config(2.0, 1, {0.0, 2.0}, 32);
    const auto ens = restart_from_states(lift, {s}, cfg, 4);
    const auto& m = lift.measures()[0];
    double expect = 0.4;
    for (std::size_t j = 0; j < m.size(); ++j) expect += m.weights[j] * s.U[0][j] * std::exp(-m.nodes[j] * 2.0);
    CHECK(ens.value(0, 0, 0) == doctest::Approx(total_mass(lift, s)[0]).epsilon(1e-15));
    CHECK(ens.value(0, 1, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("restart from the initial state has the law of a fresh run") {
    const Lift lift(heston1d(), 64);
    const auto cfg = config(1.0, 10000, {1.0}, 64);
    const auto fresh = sample_mean(simulate_paths(lift, cfg, 2).column(0, 0));
    const auto again = sample_mean(
        restart_from_states(lift, std::vector<LiftState>(10000, init_state(lift)), cfg, 3).column(0, 0));
    CHECK(std::abs(fresh.mean - again.mean) < 3.0 * std::hypot(fresh.se, again.se));
  }
  SUBCASE("same seed, same ensemble; bad shapes are rejected") {
    const Lift lift(heston1d(), 16);
    const auto cfg = config(0.5, 1, {0.5}, 16);
    const std::vector<LiftState> states(7, init_state(lift));
    CHECK(same_bits(restart_from_states(lift, states, cfg, 9).vbar, restart_from_states(lift, states, cfg, 9).vbar));
    auto bad = states;
    bad[3].U[0].pop_back();
    CHECK_THROWS_AS(restart_from_states(lift, bad, cfg, 9), DomainError);
  }
}

TEST_CASE("simulate_to_steps reproduces the path prefix") {
  const Lift lift(heston1d(), 32);
  const auto ens = simulate_paths(lift, config(1.0, 3, {0.3, 1.0}, 32), 17);
  const auto states = simulate_to_steps(lift, 0.01, {30, 100, 30}, 17);
  CHECK(total_mass(lift, states[0])[0] == ens.value(0, 0, 0));
  CHECK(total_mass(lift, states[1])[0] == ens.value(1, 1, 0));
  CHECK(total_mass(lift, states[2])[0] == ens.value(2, 0, 0));
  CHECK(states[1].t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power-law initial curve") {
  auto m = heston1d();
  m.initial.kind = InitialKind::DiracPlusPower;
  m.initial.mu_exponent = 0.1;
  const Lift lift(m, 32);
  const auto ens = simulate_paths(lift, config(1.0, 50, {0.5, 1.0}, 32), 3);
  for (double v : ens.vbar) CHECK(std::isfinite(v));
  CHECK_THROWS_AS(simulate_paths(lift, config(1.0, 2, {0.0, 1.0}, 32), 3), NumericError);
}

TEST_CASE("errors") {
  const Lift lift(heston1d(), 16);
  auto s = init_state(lift);
  s.U[0][0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(step(lift, make_plan(lift, 0.01), s, {0.0}), NumericError);
  CHECK_THROWS_AS(step(lift, make_plan(lift, 0.01), s, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(check_config(config(1.0, 1, {0.005})), DomainError);
  CHECK_THROWS_AS(check_config(config(1.0, 1, {2.0})), DomainError);
  CHECK_THROWS_AS(check_config(config(1.0, 1, {0.5, 0.5})), DomainError);
  CHECK_THROWS_AS(check_config(config(1.0, 0, {})), DomainError);
  CHECK(steps_to(0.3, 0.01) == 30);
}

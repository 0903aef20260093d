#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "svlift/ergodics.hpp"
#include "svlift/errors.hpp"
#include "svlift/riccati.hpp"

using namespace svlift;

namespace {

AffineModel null_model(double v0) {
  AffineModel m = AffineModel::zeros(1, 0, 1);
  m.kernel.alpha = {0.75};
  m.kernel.delta = 1.0;
  m.initial.v0 = {v0};
  return m;
}

SimConfig config(double horizon, std::size_t paths, std::vector<double> grid) {
  SimConfig c;
  c.dt = 1e-2;
  c.horizon = horizon;
  c.n_paths = paths;
  c.record_grid = std::move(grid);
  c.n_nodes = 64;
  return c;
}

// W1 as the integral of |F_a - F_b| over the merged support.
double w1_from_cdfs(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> xs = a;
  xs.insert(xs.end(), b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  auto cdf = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) / static_cast<double>(v.size());
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) total += std::abs(cdf(a, xs[k]) - cdf(b, xs[k])) * (xs[k + 1] - xs[k]);
  return total;
}

}  // namespace

TEST_CASE("wasserstein1 basic values") {
  CHECK(wasserstein1({0.0}, {1.0}) == 1.0);
  CHECK(wasserstein1({1.0, 2.0, 3.0}, {3.0, 1.0, 2.0}) == 0.0);
  CHECK(wasserstein1({0.0, 0.0}, {0.0, 2.0}) == 1.0);
  CHECK(wasserstein1({0.0, 1.0}, {0.5}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(wasserstein1({}, {1.0}), DomainError);
}

TEST_CASE("wasserstein1 against the CDF formula") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n01;
  for (auto [na, nb] : {std::pair{10, 10}, std::pair{7, 13}, std::pair{100, 37}, std::pair{1, 50}}) {
    std::vector<double> a(na), b(nb), c(nb);
    for (auto& x : a) x = n01(gen);
    for (auto& x : b) x = 0.3 + 2.0 * n01(gen);
    for (auto& x : c) x = n01(gen) * n01(gen);
    CAPTURE(na);
    CAPTURE(nb);
    const double ab = wasserstein1(a, b);
    CHECK(ab == doctest::Approx(w1_from_cdfs(a, b)).epsilon(1e-12));
    CHECK(ab == doctest::Approx(wasserstein1(b, a)).epsilon(1e-14));
    CHECK(ab <= wasserstein1(a, c) + wasserstein1(c, b) + 1e-12);
    std::vector<double> shifted = a;
    for (auto& x : shifted) x += 1.25;
    CHECK(wasserstein1(a, shifted) == doctest::Approx(1.25).epsilon(1e-13));
  }
}

TEST_CASE("sample_mean") {
  const auto e = sample_mean({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == 2.5);
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(sample_mean({3.0}).se == 0.0);
}

TEST_CASE("moment curve of null dynamics is flat") {
  const Lift lift(null_model(2.0), 32);
  const auto curve = moment_curve(simulate_paths(lift, config(2.0, 50, {0.5, 1.0, 2.0}), 3));
  REQUIRE(curve.times.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(curve.mean[k] == 2.0);
    CHECK(curve.se[k] == 0.0);
  }
  std::ostringstream os;
  write_moment_curve_csv(os, curve);
  CHECK(os.str().rfind("t,mean,se\n", 0) == 0);
}

// Without noise every U_j is negative, so the norm is V0 + (V0 - Vbar).
TEST_CASE("moment curve without noise follows the analytic mean") {
  const Lift lift(preset_rough_heston_1d(1.0, 0.0, 0.75, 1.0, 1.0), 128);
  const auto curve = moment_curve(simulate_paths(lift, config(5.0, 2, {1.0, 2.0, 5.0}), 3));
  const SqrtParams p{1.0, 1.0, 0.0, 0.75, 1.0};
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    CAPTURE(curve.times[k]);
    CHECK(std::abs(curve.mean[k] - (2.0 - expected_mass(p, curve.times[k]))) < 2e-3);
    CHECK(curve.se[k] == 0.0);
  }
}

TEST_CASE("kb_average") {
  const Lift lift(preset_rough_heston_1d(1.0, 0.3, 0.75, 1.0, 1.0), 32);
  const auto cfg = config(1.0, 1, {});
  const double T = 4.0;
  const auto a = kb_average(lift, cfg, T, 400, 11);
  const auto b = kb_average(lift, cfg, T, 400, 11);
  const auto c = kb_average(lift, cfg, T, 400, 12);
  REQUIRE(a.size() == 400);
  CHECK(a.marginal(0) == b.marginal(0));
  CHECK(a.marginal(0) != c.marginal(0));

  std::vector<double> times;
  for (const auto& s : a.states) {
    CHECK(s.t > 0.0);
    CHECK(s.t <= T + 1e-12);
    const double k = s.t / cfg.dt;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
    times.push_back(s.t);
  }
  // uniform on the grid: mean (T + dt) / 2
  const auto m = sample_mean(times);
  CHECK(std::abs(m.mean - 0.5 * (T + cfg.dt)) < 3.0 * m.se);

  const Lift null_lift(null_model(0.7), 16);
  const auto n = kb_average(null_lift, cfg, T, 20, 1);
  for (double v : n.marginal(0)) CHECK(v == 0.7);
}

TEST_CASE("stationarity of null dynamics") {
  const Lift lift(null_model(1.5), 16);
  const auto cfg = config(1.0, 1, {});
  const auto kb = kb_average(lift, cfg, 2.0, 100, 5);
  const auto r = stationarity_test(lift, cfg, kb, 1.0, 6);
  CHECK(r.h == 1.0);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].w1 == 0.0);
  CHECK(r.rows[0].noise_floor == 0.0);
}

TEST_CASE("noiseless Dirac control moves by the mean") {
  const Lift lift(preset_rough_heston_1d(1.0, 0.0, 0.75, 1.0, 1.0), 128);
  const auto cfg = config(1.0, 1, {});
  const double h = 5.0;
  const auto r = stationarity_test(lift, cfg, dirac_measure(lift, 10), h, 2);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].noise_floor == 0.0);
  CHECK(std::abs(r.rows[0].w1 - (1.0 - expected_mass(SqrtParams{1.0, 1.0, 0.0, 0.75, 1.0}, h))) < 2e-3);
}

#include "svlift/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "svlift/csv.hpp"
#include "svlift/errors.hpp"
#include "svlift/rng.hpp"

namespace svlift {

MeanEstimate sample_mean(const std::vector<double>& x) {
  if (x.empty()) throw DomainError("sample_mean: empty sample");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  MeanEstimate out;
  out.mean = mean;
  out.se = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

MomentCurve moment_curve(const PathEnsemble& ens) {
  if (ens.n_paths == 0) throw DomainError("moment_curve: empty ensemble");
  MomentCurve c;
  c.times = ens.times;
  std::vector<double> col(ens.n_paths);
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    for (std::size_t p = 0; p < ens.n_paths; ++p) col[p] = ens.norm_at(p, k);
    const auto m = sample_mean(col);
    c.mean.push_back(m.mean);
    c.se.push_back(m.se);
  }
  return c;
}

std::vector<double> EmpiricalMeasure::marginal(std::size_t i) const {
  std::vector<double> out(vbar.size());
  for (std::size_t s = 0; s < vbar.size(); ++s) out[s] = vbar[s][i];
  return out;
}

EmpiricalMeasure kb_average(const Lift& lift, const SimConfig& config, double T, std::size_t n_samples,
                            std::uint64_t seed) {
  if (n_samples < 1) throw DomainError("kb_average: need at least one sample");
  if (!(T > 0.0)) throw DomainError("kb_average: T must be positive");
  const std::size_t n_grid = steps_to(T, config.dt);
  std::vector<std::size_t> steps(n_samples);
  for (std::size_t p = 0; p < n_samples; ++p) {
    const double v = rng::PathStream(seed, rng::Stream::SnapshotTimes, p).uniform(0);
    steps[p] = std::min(n_grid, 1 + static_cast<std::size_t>(v * static_cast<double>(n_grid)));
  }
  EmpiricalMeasure em;
  em.states = simulate_to_steps(lift, config.dt, steps, seed, config.threads);
  em.T = T;
  em.seed = seed;
  for (const auto& s : em.states) em.vbar.push_back(total_mass(lift, s));
  return em;
}

EmpiricalMeasure dirac_measure(const Lift& lift, std::size_t n) {
  EmpiricalMeasure em;
  em.states.assign(n, init_state(lift));
  em.vbar.assign(n, total_mass(lift, em.states.front()));
  return em;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("wasserstein1: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  // Walk the merged quantile breakpoints i/na and j/nb.
  std::size_t i = 0, j = 0;
  double q = 0.0;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double qa = static_cast<double>(i + 1) / na;
    const double qb = static_cast<double>(j + 1) / nb;
    const double next = std::min(qa, qb);
    total += (next - q) * std::abs(a[i] - b[j]);
    q = next;
    if (qa <= next) ++i;
    if (qb <= next) ++j;
  }
  return total;
}

StationarityReport stationarity_test(const Lift& lift, const SimConfig& config, const EmpiricalMeasure& kb,
                                     double h, std::uint64_t seed) {
  if (kb.size() < 2) throw DomainError("stationarity_test: need at least two samples");
  if (!(h > 0.0)) throw DomainError("stationarity_test: h must be positive");
  SimConfig cfg = config;
  cfg.horizon = h;
  cfg.record_grid = {0.0, h};
  const auto ens = restart_from_states(lift, kb.states, cfg, seed);

  StationarityReport rep;
  rep.h = h;
  const std::size_t half = kb.size() / 2;
  for (std::size_t i = 0; i < lift.dimension(); ++i) {
    const auto at0 = ens.column(0, i);
    const auto ath = ens.column(1, i);
    StationarityRow row;
    row.component = i;
    row.w1 = wasserstein1(at0, ath);
    row.noise_floor = wasserstein1(std::vector<double>(at0.begin(), at0.begin() + half),
                                   std::vector<double>(at0.begin() + half, at0.end()));
    rep.rows.push_back(row);
  }
  return rep;
}

void write_moment_curve_csv(std::ostream& os, const MomentCurve& c) {
  csv::Writer w(os);
  w.header({"t", "mean", "se"});
  for (std::size_t k = 0; k < c.times.size(); ++k) w.field(c.times[k]).field(c.mean[k]).field(c.se[k]).end_row();
}

}  // namespace svlift

#pragma once

// Empirical diagnostics for invariant measures of the lift: moment curves,
// Krylov-Bogoliubov time averages sampled at uniform times, 1D Wasserstein
// distances and a restart-based stationarity test.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "svlift/lift_sim.hpp"

namespace svlift {

struct MomentCurve {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> se;
};

MomentCurve moment_curve(const PathEnsemble& ensemble);

// Sample mean and its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};
MeanEstimate sample_mean(const std::vector<double>& x);

struct EmpiricalMeasure {
  std::vector<LiftState> states;        // uniform weights
  std::vector<std::vector<double>> vbar;  // Vbar of each state
  double T = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return states.size(); }
  std::vector<double> marginal(std::size_t i) const;
};

// One independent path per sample, stopped at a time drawn uniformly from
// the dt-grid on (0, T].
EmpiricalMeasure kb_average(const Lift& lift, const SimConfig& config, double T, std::size_t n_samples,
                            std::uint64_t seed);

// n copies of init_state.
EmpiricalMeasure dirac_measure(const Lift& lift, std::size_t n);

// L1 distance between the empirical quantile functions.
double wasserstein1(std::vector<double> a, std::vector<double> b);

struct StationarityRow {
  std::size_t component = 0;
  double w1 = 0.0;
  double noise_floor = 0.0;
};

struct StationarityReport {
  double h = 0.0;
  std::vector<StationarityRow> rows;
};

// Restarts every sample of kb, records Vbar at offsets 0 and h and compares
// the two laws per component.  The noise floor is W1 between the first and
// second half of the offset-0 sample.
StationarityReport stationarity_test(const Lift& lift, const SimConfig& config, const EmpiricalMeasure& kb,
                                     double h, std::uint64_t seed);

// CSV columns t, mean, se.
void write_moment_curve_csv(std::ostream& os, const MomentCurve& curve);

}  // namespace svlift

#pragma once

// Finite-rank Markovian lift.  Component i carries factors U_ij, one per node
// x_ij of its discretized measure, and
//   Vbar_i(t) = g_i(t) + sum_j w_ij U_ij(t).
// One step of size dt with frozen left-point coefficients:
//   dX_i = -sum_k beta_ik Vbar+_k dt + sum_j sigma_ij(Vbar+) dW_j
//   U_ij <- e^{-x_ij dt} U_ij + a_ij dX_i,   a_ij = (1 - e^{-x_ij dt}) / (x_ij dt)
// where Vbar+ clamps the square-root block at zero (full truncation).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "svlift/kernel.hpp"
#include "svlift/model.hpp"

namespace svlift {

struct SimConfig {
  double dt = 1e-2;
  double horizon = 1.0;
  std::size_t n_paths = 1;
  std::vector<double> record_grid;  // times in [0, horizon], multiples of dt
  std::size_t n_nodes = 128;
  double tail_width = kDefaultTailWidth;  // x_max = delta + tail_width
  int threads = 0;                        // 0: OpenMP default

  bool operator==(const SimConfig&) const = default;
};

void check_config(const SimConfig& config);

// Number of dt-steps that reach t; throws unless t is a multiple of dt up to rounding.
std::size_t steps_to(double t, double dt);

class Lift {
 public:
  Lift(AffineModel model, std::size_t n_nodes, double tail_width = kDefaultTailWidth);
  Lift(AffineModel model, const SimConfig& config) : Lift(std::move(model), config.n_nodes, config.tail_width) {}

  const AffineModel& model() const { return model_; }
  const std::vector<DiscretizedMeasure>& measures() const { return measures_; }
  std::size_t dimension() const { return model_.d; }

 private:
  AffineModel model_;
  std::vector<DiscretizedMeasure> measures_;
};

struct LiftState {
  double t = 0.0;
  std::vector<std::vector<double>> U;  // U[i][j]
};

LiftState init_state(const Lift& lift);

// Vbar_i = g_i(t) + sum_j w_ij U_ij.
std::vector<double> total_mass(const Lift& lift, const LiftState& state);

// sum_i (|g_i(t)| + sum_j w_ij |U_ij|), an upper estimate of the total variation of the lift.
double mass_norm(const Lift& lift, const LiftState& state);

// Precomputed per-node decay and forcing factors for a fixed dt.
struct StepPlan {
  double dt = 0.0;
  double sqrt_dt = 0.0;
  std::vector<std::vector<double>> decay;    // e^{-x dt}
  std::vector<std::vector<double>> forcing;  // (1 - e^{-x dt}) / (x dt)
};

StepPlan make_plan(const Lift& lift, double dt);

// Advances the state by plan.dt.  dW holds Brownian increments (already
// scaled by sqrt(dt)), one per driver.  Throws NumericError on overflow.
void step(const Lift& lift, const StepPlan& plan, LiftState& state, const std::vector<double>& dW);

struct PathEnsemble {
  std::vector<double> times;
  std::size_t d = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  SimConfig config;
  std::vector<double> vbar;  // [path][time][component]
  std::vector<double> norm;  // [path][time]

  double value(std::size_t path, std::size_t k, std::size_t i) const {
    return vbar[(path * times.size() + k) * d + i];
  }
  double norm_at(std::size_t path, std::size_t k) const { return norm[path * times.size() + k]; }
  // Component i at record index k across all paths.
  std::vector<double> column(std::size_t k, std::size_t i) const;
};

PathEnsemble simulate_paths(const Lift& lift, const SimConfig& config, std::uint64_t seed);

// Same output as simulate_paths, computed on one thread.  Kept as the
// reference for tests and benchmarks.
PathEnsemble simulate_paths_serial(const Lift& lift, const SimConfig& config, std::uint64_t seed);

// One trajectory per state with fresh noise.  config.record_grid and
// config.horizon are offsets from each state's own time; config.n_paths is ignored.
PathEnsemble restart_from_states(const Lift& lift, const std::vector<LiftState>& states,
                                 const SimConfig& config, std::uint64_t seed);

// State of path p after steps[p] steps from init_state, one path per entry.
std::vector<LiftState> simulate_to_steps(const Lift& lift, double dt, const std::vector<std::size_t>& steps,
                                         std::uint64_t seed, int threads = 0);

// Columns path_id, t, vbar_1..vbar_d, norm_estimate.
void write_trajectories_csv(std::ostream& os, const PathEnsemble& ensemble);

// Columns path_id, i, j, U_ij; '#' header lines carry the seed and each path's time.
void write_snapshot_csv(std::ostream& os, const std::vector<LiftState>& states, std::uint64_t seed);

}  // namespace svlift

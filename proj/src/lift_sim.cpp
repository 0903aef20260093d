#include "svlift/lift_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "svlift/csv.hpp"
#include "svlift/errors.hpp"
#include "svlift/rng.hpp"

namespace svlift {

void check_config(const SimConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw DomainError("sim: dt must be positive");
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon))
    throw DomainError("sim: horizon must be positive");
  if (config.n_paths < 1) throw DomainError("sim: n_paths must be at least 1");
  if (config.n_nodes < 1) throw DomainError("sim: n_nodes must be at least 1");
  if (!(config.tail_width > 0.0)) throw DomainError("sim: tail width must be positive");
  if (config.threads < 0) throw DomainError("sim: threads must be >= 0");
  steps_to(config.horizon, config.dt);
  double prev = -1.0;
  for (double t : config.record_grid) {
    if (t < 0.0 || t > config.horizon * (1.0 + 1e-12))
      throw DomainError("sim: record time " + std::to_string(t) + " outside [0, horizon]");
    if (!(t > prev)) throw DomainError("sim: record grid must be strictly increasing");
    steps_to(t, config.dt);
    prev = t;
  }
}

std::size_t steps_to(double t, double dt) {
  const double r = t / dt;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r))
    throw DomainError("sim: time " + std::to_string(t) + " is not a multiple of dt = " + std::to_string(dt));
  return static_cast<std::size_t>(n);
}

Lift::Lift(AffineModel model, std::size_t n_nodes, double tail_width) : model_(std::move(model)) {
  const auto violations = validate(model_);
  if (!violations.empty()) throw DomainError("lift: invalid model\n" + describe(violations));
  for (std::size_t i = 0; i < model_.d; ++i)
    measures_.push_back(discretize_measure(model_.kernel, i, n_nodes, model_.kernel.delta + tail_width));
}

LiftState init_state(const Lift& lift) {
  LiftState s;
  for (const auto& m : lift.measures()) s.U.emplace_back(m.size(), 0.0);
  return s;
}

namespace {

double weighted_sum(const DiscretizedMeasure& m, const std::vector<double>& u) {
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += m.weights[j] * u[j];
  return acc;
}

void check_shape(const Lift& lift, const LiftState& s) {
  if (s.U.size() != lift.dimension()) throw DomainError("lift state: wrong number of components");
  for (std::size_t i = 0; i < s.U.size(); ++i)
    if (s.U[i].size() != lift.measures()[i].size())
      throw DomainError("lift state: component " + std::to_string(i + 1) + " has the wrong number of factors");
}

}  // namespace

std::vector<double> total_mass(const Lift& lift, const LiftState& state) {
  std::vector<double> v(lift.dimension());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = initial_curve(lift.model(), i, state.t) + weighted_sum(lift.measures()[i], state.U[i]);
  return v;
}

double mass_norm(const Lift& lift, const LiftState& state) {
  double total = 0.0;
  for (std::size_t i = 0; i < lift.dimension(); ++i) {
    const auto& m = lift.measures()[i];
    double acc = std::abs(initial_curve(lift.model(), i, state.t));
    for (std::size_t j = 0; j < m.size(); ++j) acc += m.weights[j] * std::abs(state.U[i][j]);
    total += acc;
  }
  return total;
}

StepPlan make_plan(const Lift& lift, double dt) {
  if (!(dt > 0.0)) throw DomainError("make_plan: dt must be positive");
  StepPlan plan;
  plan.dt = dt;
  plan.sqrt_dt = std::sqrt(dt);
  for (const auto& m : lift.measures()) {
    std::vector<double> decay(m.size()), forcing(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double z = m.nodes[j] * dt;
      decay[j] = std::exp(-z);
      forcing[j] = -std::expm1(-z) / z;
    }
    plan.decay.push_back(std::move(decay));
    plan.forcing.push_back(std::move(forcing));
  }
  return plan;
}

void step(const Lift& lift, const StepPlan& plan, LiftState& state, const std::vector<double>& dW) {
  const AffineModel& model = lift.model();
  if (dW.size() != model.m) throw DomainError("step: need one increment per Brownian driver");
  check_shape(lift, state);
  const double dt = plan.dt;

  std::vector<double> x(model.d);
  for (std::size_t i = 0; i < model.d; ++i) {
    const double v = initial_curve_average(model, i, state.t, dt) + weighted_sum(lift.measures()[i], state.U[i]);
    x[i] = model.is_square_root(i) ? std::max(v, 0.0) : v;
  }
  const auto b = drift(model, x);
  for (std::size_t i = 0; i < model.d; ++i) {
    const auto row = diffusion_row(model, i, x);
    double dx = b[i] * dt;
    for (std::size_t j = 0; j < model.m; ++j) dx += row[j] * dW[j];
    auto& u = state.U[i];
    for (std::size_t j = 0; j < u.size(); ++j) {
      u[j] = plan.decay[i][j] * u[j] + plan.forcing[i][j] * dx;
      if (!std::isfinite(u[j])) throw NumericError("step: non-finite factor at t = " + std::to_string(state.t));
    }
  }
  state.t += dt;
}

std::vector<double> PathEnsemble::column(std::size_t k, std::size_t i) const {
  std::vector<double> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = value(p, k, i);
  return out;
}

namespace {

// Fused per-path kernel: keeps sum_j w_ij U_ij up to date while updating the
// factors, so each step touches every factor exactly once.  Arithmetic is
// ordered exactly as in step(), which the tests rely on.
class PathRunner {
 public:
  PathRunner(const Lift& lift, const StepPlan& plan)
      : lift_(lift), model_(lift.model()), plan_(plan), x_(model_.d), root_(model_.d), z_(model_.m),
        wu_(model_.d) {}

  void run(LiftState& st, const rng::PathStream& rs, std::size_t n_steps, const std::vector<std::size_t>& record_steps,
           double* vbar_out, double* norm_out) {
    const std::size_t d = model_.d;
    const std::size_t m = model_.m;
    const double dt = plan_.dt;
    for (std::size_t i = 0; i < d; ++i) wu_[i] = weighted_sum(lift_.measures()[i], st.U[i]);

    std::size_t next_record = 0;
    for (std::size_t n = 0;; ++n) {
      while (next_record < record_steps.size() && record_steps[next_record] == n) {
        for (std::size_t i = 0; i < d; ++i) vbar_out[next_record * d + i] = initial_curve(model_, i, st.t) + wu_[i];
        norm_out[next_record] = mass_norm(lift_, st);
        ++next_record;
      }
      if (n == n_steps) break;

      for (std::size_t i = 0; i < d; ++i) {
        const double v = initial_curve_average(model_, i, st.t, dt) + wu_[i];
        x_[i] = model_.is_square_root(i) ? std::max(v, 0.0) : v;
        root_[i] = model_.is_square_root(i) ? std::sqrt(x_[i]) : 0.0;
      }
      rs.normals(n, z_.data(), m);
      for (std::size_t j = 0; j < m; ++j) z_[j] *= plan_.sqrt_dt;

      for (std::size_t i = 0; i < d; ++i) {
        double b = 0.0;
        for (std::size_t k = 0; k < d; ++k) b -= model_.b(i, k) * x_[k];
        double dx = b * dt;
        for (std::size_t j = 0; j < m; ++j) {
          double row = 0.0;
          for (std::size_t k = 0; k < d; ++k) {
            const double s = model_.s(i, j, k);
            if (s != 0.0) row += s * root_[k];
          }
          dx += row * z_[j];
        }
        const double* e = plan_.decay[i].data();
        const double* a = plan_.forcing[i].data();
        const double* w = lift_.measures()[i].weights.data();
        double* u = st.U[i].data();
        const std::size_t nn = st.U[i].size();
        double acc = 0.0;
        for (std::size_t j = 0; j < nn; ++j) {
          u[j] = e[j] * u[j] + a[j] * dx;
          acc += w[j] * u[j];
        }
        if (!std::isfinite(acc)) throw NumericError("non-finite factor at t = " + std::to_string(st.t));
        wu_[i] = acc;
      }
      st.t += dt;
    }
  }

 private:
  const Lift& lift_;
  const AffineModel& model_;
  const StepPlan& plan_;
  std::vector<double> x_, root_, z_, wu_;
};

int thread_count(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

void rethrow_first(const std::vector<std::string>& errors) {
  for (std::size_t p = 0; p < errors.size(); ++p)
    if (!errors[p].empty()) throw NumericError("path " + std::to_string(p) + ": " + errors[p]);
}

PathEnsemble run_ensemble(const Lift& lift, const SimConfig& config, std::uint64_t seed,
                          const std::vector<LiftState>* starts, rng::Stream stream, bool parallel) {
  check_config(config);
  const std::size_t n_paths = starts ? starts->size() : config.n_paths;
  if (n_paths == 0) throw DomainError("simulate: no paths");
  if (starts)
    for (const auto& s : *starts) check_shape(lift, s);

  PathEnsemble ens;
  ens.times = config.record_grid;
  ens.d = lift.dimension();
  ens.n_paths = n_paths;
  ens.seed = seed;
  ens.config = config;
  const std::size_t n_rec = ens.times.size();
  ens.vbar.assign(n_paths * n_rec * ens.d, 0.0);
  ens.norm.assign(n_paths * n_rec, 0.0);

  std::vector<std::size_t> record_steps;
  for (double t : ens.times) record_steps.push_back(steps_to(t, config.dt));
  const std::size_t n_steps = steps_to(config.horizon, config.dt);
  const StepPlan plan = make_plan(lift, config.dt);
  std::vector<std::string> errors(n_paths);
  const long long np = static_cast<long long>(n_paths);

#pragma omp parallel num_threads(thread_count(config.threads)) if (parallel)
  {
    PathRunner runner(lift, plan);
#pragma omp for schedule(static)
    for (long long p = 0; p < np; ++p) {
      const auto up = static_cast<std::size_t>(p);
      try {
        LiftState st = starts ? (*starts)[up] : init_state(lift);
        runner.run(st, rng::PathStream(seed, stream, up), n_steps, record_steps,
                   ens.vbar.data() + up * n_rec * ens.d, ens.norm.data() + up * n_rec);
      } catch (const std::exception& e) {
        errors[up] = e.what();
      }
    }
  }
  rethrow_first(errors);
  return ens;
}

}  // namespace

PathEnsemble simulate_paths(const Lift& lift, const SimConfig& config, std::uint64_t seed) {
  return run_ensemble(lift, config, seed, nullptr, rng::Stream::Paths, true);
}

PathEnsemble simulate_paths_serial(const Lift& lift, const SimConfig& config, std::uint64_t seed) {
  return run_ensemble(lift, config, seed, nullptr, rng::Stream::Paths, false);
}

PathEnsemble restart_from_states(const Lift& lift, const std::vector<LiftState>& states, const SimConfig& config,
                                 std::uint64_t seed) {
  return run_ensemble(lift, config, seed, &states, rng::Stream::Restart, true);
}

std::vector<LiftState> simulate_to_steps(const Lift& lift, double dt, const std::vector<std::size_t>& steps,
                                         std::uint64_t seed, int threads) {
  const StepPlan plan = make_plan(lift, dt);
  std::vector<LiftState> out(steps.size());
  std::vector<std::string> errors(steps.size());
  const long long np = static_cast<long long>(steps.size());
  const std::vector<std::size_t> no_records;

#pragma omp parallel num_threads(thread_count(threads))
  {
    PathRunner runner(lift, plan);
#pragma omp for schedule(dynamic, 64)
    for (long long p = 0; p < np; ++p) {
      const auto up = static_cast<std::size_t>(p);
      try {
        LiftState st = init_state(lift);
        runner.run(st, rng::PathStream(seed, rng::Stream::Paths, up), steps[up], no_records, nullptr, nullptr);
        out[up] = std::move(st);
      } catch (const std::exception& e) {
        errors[up] = e.what();
      }
    }
  }
  rethrow_first(errors);
  return out;
}

void write_trajectories_csv(std::ostream& os, const PathEnsemble& ens) {
  csv::Writer w(os);
  std::vector<std::string> cols{"path_id", "t"};
  for (std::size_t i = 0; i < ens.d; ++i) cols.push_back("vbar_" + std::to_string(i + 1));
  cols.push_back("norm_estimate");
  w.header(cols);
  for (std::size_t p = 0; p < ens.n_paths; ++p)
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      w.field(p).field(ens.times[k]);
      for (std::size_t i = 0; i < ens.d; ++i) w.field(ens.value(p, k, i));
      w.field(ens.norm_at(p, k)).end_row();
    }
}

void write_snapshot_csv(std::ostream& os, const std::vector<LiftState>& states, std::uint64_t seed) {
  os << "# seed=" << seed << '\n';
  for (std::size_t p = 0; p < states.size(); ++p) os << "# path " << p << " t=" << csv::fmt(states[p].t) << '\n';
  csv::Writer w(os);
  w.header({"path_id", "i", "j", "U_ij"});
  for (std::size_t p = 0; p < states.size(); ++p)
    for (std::size_t i = 0; i < states[p].U.size(); ++i)
      for (std::size_t j = 0; j < states[p].U[i].size(); ++j)
        w.field(p).field(i + 1).field(j + 1).field(states[p].U[i][j]).end_row();
}

}  // namespace svlift

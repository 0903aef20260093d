#include "svlift/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

#include "svlift/csv.hpp"
#include "svlift/ergodics.hpp"
#include "svlift/errors.hpp"
#include "svlift/kernel.hpp"
#include "svlift/lift_sim.hpp"

namespace svlift {

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"validate",     "kernel-check", "mean-check", "laplace-check",
                                              "bound-check", "simulate",     "stationarity"};
  return names;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

SqrtParams sqrt_params(const AffineModel& model, std::size_t i) {
  if (!model.is_square_root(i)) throw DomainError("component " + std::to_string(i + 1) + " is not a square-root component");
  SqrtParams p;
  p.v0 = model.initial.v0[i];
  p.beta = model.b(i, i);
  double s2 = 0.0;
  for (std::size_t j = 0; j < model.m; ++j) s2 += model.s(i, j, i) * model.s(i, j, i);
  p.sigma = std::sqrt(s2);
  p.alpha = model.kernel.alpha[i];
  p.delta = model.kernel.delta;
  return p;
}

double analytic_mean(const AffineModel& model, std::size_t i, double t) {
  if (model.initial.kind != InitialKind::DiracAtZero)
    throw DomainError("analytic_mean: only available for a Dirac initial condition at zero");
  if (model.is_square_root(i)) return expected_mass(sqrt_params(model, i), t);
  double m = model.initial.v0[i];
  for (std::size_t k = 0; k < model.d_tilde; ++k)
    if (model.b(i, k) != 0.0) m += fed_component_mean(sqrt_params(model, k), 0.0, model.b(i, k), model.kernel.alpha[i], t);
  return m;
}

namespace {

struct Gate {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

class Run {
 public:
  Run(std::string name, const RunConfig& cfg, std::filesystem::path dir, std::ostream& log)
      : name_(std::move(name)), cfg_(cfg), dir_(std::move(dir)), log_(log), start_(now()) {
    std::filesystem::create_directories(dir_);
  }

  std::ofstream open(const std::string& file) {
    files_.push_back(file);
    std::ofstream os(dir_ / file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / file).string());
    return os;
  }

  // value <= threshold passes
  void at_most(const std::string& gate, double value, double threshold) { add(gate, value, threshold, value <= threshold); }
  void at_least(const std::string& gate, double value, double threshold) { add(gate, value, threshold, value >= threshold); }

  int finish() {
    {
      auto os = open("gates.csv");
      csv::Writer w(os);
      w.header({"gate", "value", "threshold", "pass"});
      for (const auto& g : gates_) w.field(g.name).field(g.value).field(g.threshold).field(g.pass ? 1 : 0).end_row();
    }
    {
      auto os = open("config.resolved.toml");
      os << serialize_config(cfg_);
    }
    const bool ok = std::all_of(gates_.begin(), gates_.end(), [](const Gate& g) { return g.pass; });
    const int code = ok ? kExitPass : kExitGateFailed;
    std::ofstream mf(dir_ / "manifest.toml", std::ios::binary);
    mf << "[run]\n"
       << "tool = \"svlift\"\n"
       << "version = \"" << kToolVersion << "\"\n"
       << "subcommand = \"" << name_ << "\"\n"
       << "seed = " << cfg_.seed << "\n"
       << "config = \"config.resolved.toml\"\n"
       << "started = \"" << start_ << "\"\n"
       << "finished = \"" << now() << "\"\n"
       << "exit_status = " << code << "\n\n"
       << "[artifacts]\n";
    for (const auto& f : files_) mf << '"' << f << "\" = \"sha256:" << sha256_file(dir_ / f) << "\"\n";
    return code;
  }

  std::ostream& log() { return log_; }

 private:
  std::string name_;
  const RunConfig& cfg_;
  std::filesystem::path dir_;
  std::ostream& log_;
  std::string start_;
  std::vector<std::string> files_;
  std::vector<Gate> gates_;

  void add(const std::string& gate, double value, double threshold, bool pass) {
    gates_.push_back({gate, value, threshold, pass});
    log_ << (pass ? "PASS " : "FAIL ") << gate << ": " << csv::fmt(value) << " vs " << csv::fmt(threshold) << '\n';
  }

  static std::string now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
};

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

SimConfig recording(const SimConfig& base, const std::vector<double>& times) {
  SimConfig s = base;
  s.record_grid = times;
  std::sort(s.record_grid.begin(), s.record_grid.end());
  s.horizon = max_of(s.record_grid);
  return s;
}

void cmd_validate(Run& run, const RunConfig& cfg) {
  const auto v = validate(cfg.model);
  auto os = run.open("validation.csv");
  csv::Writer w(os);
  w.header({"clause", "message"});
  for (const auto& x : v) w.field(x.clause).field(x.message).end_row();
  if (!v.empty()) run.log() << describe(v);
  run.at_most("violations", static_cast<double>(v.size()), 0.0);
}

void cmd_kernel_check(Run& run, const RunConfig& cfg) {
  const auto& spec = cfg.model.kernel;
  const double x_max = spec.delta + cfg.sim.tail_width;
  const std::size_t n = cfg.experiment.check_nodes;
  auto os = run.open("kernel_check.csv");
  csv::Writer w(os);
  w.header({"component", "t", "K_exact", "K_discretized", "rel_err"});
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    const auto m = discretize_measure(spec, i, n, x_max);
    const auto m2 = discretize_measure(spec, i, 2 * n, x_max);
    {
      auto ms = run.open("measure_" + std::to_string(i + 1) + ".csv");
      write_measure_csv(ms, m);
    }
    const std::size_t pts = cfg.experiment.check_points;
    const double lo = std::log(m.t_min), hi = std::log(m.t_max);
    for (std::size_t k = 0; k < pts; ++k) {
      const double t = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(pts - 1, 1)));
      const double exact = kernel_eval(spec, i, t);
      const double approx = m.laplace(t);
      w.field(i + 1).field(t).field(exact).field(approx).field(std::abs(approx - exact) / exact).end_row();
    }
    const double e1 = discretization_error(spec, m, pts);
    const double e2 = discretization_error(spec, m2, pts);
    const std::string tag = "component " + std::to_string(i + 1);
    run.at_most(tag + " sup rel error", e1, cfg.experiment.kernel_tol);
    run.at_most(tag + " error with doubled nodes", e2, e1);
  }
}

void cmd_mean_check(Run& run, const RunConfig& cfg) {
  const Lift lift(cfg.model, cfg.sim);
  const SimConfig sim = recording(cfg.sim, cfg.experiment.mean_times);
  const auto ens = simulate_paths(lift, sim, cfg.seed);
  {
    auto ts = run.open("trajectories.csv");
    write_trajectories_csv(ts, ens);
  }
  auto os = run.open("mean_check.csv");
  csv::Writer w(os);
  w.header({"component", "t", "mc_mean", "se", "analytic", "z_score"});
  for (std::size_t i = 0; i < cfg.model.d; ++i)
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      const auto est = sample_mean(ens.column(k, i));
      const double a = analytic_mean(cfg.model, i, ens.times[k]);
      const double z = (est.mean - a) / est.se;
      w.field(i + 1).field(ens.times[k]).field(est.mean).field(est.se).field(a).field(z).end_row();
      run.at_most("component " + std::to_string(i + 1) + " |z| at t=" + csv::fmt(ens.times[k]), std::abs(z),
                  cfg.experiment.z_gate);
    }
}

void cmd_laplace_check(Run& run, const RunConfig& cfg) {
  const auto p = sqrt_params(cfg.model, 0);
  const double u = cfg.experiment.u;
  const SimConfig sim = recording(cfg.sim, cfg.experiment.laplace_times);
  const auto sol = solve_riccati(p, u, sim.horizon, cfg.experiment.riccati_steps);
  {
    auto rs = run.open("riccati.csv");
    write_riccati_csv(rs, sol);
  }
  const Lift lift(cfg.model, cfg.sim);
  const auto ens = simulate_paths(lift, sim, cfg.seed);
  auto os = run.open("laplace_check.csv");
  csv::Writer w(os);
  w.header({"t", "mc_mean", "se", "analytic", "z_score"});
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    auto col = ens.column(k, 0);
    for (double& x : col) x = std::exp(u * x);
    const auto est = sample_mean(col);
    const std::size_t n = steps_to(ens.times[k], sol.dt);
    const double a = std::exp(sol.log_transform.at(n));
    const double z = (est.mean - a) / est.se;
    w.field(ens.times[k]).field(est.mean).field(est.se).field(a).field(z).end_row();
    run.at_most("|z| at t=" + csv::fmt(ens.times[k]), std::abs(z), cfg.experiment.z_gate);
  }
}

void cmd_bound_check(Run& run, const RunConfig& cfg) {
  const auto p = sqrt_params(cfg.model, 0);
  auto os = run.open("bound_check.csv");
  csv::Writer w(os);
  w.header({"t", "value", "limit", "rel_to_limit"});
  for (double t : cfg.experiment.bound_times) {
    const auto b = bound_integral(p, cfg.experiment.mu, t);
    const double rel = b.limit != 0.0 ? b.value / b.limit - 1.0 : 0.0;
    w.field(t).field(b.value).field(b.limit).field(rel).end_row();
    if (t >= cfg.experiment.bound_from)
      run.at_most("|value/limit - 1| at t=" + csv::fmt(t), std::abs(rel), cfg.experiment.bound_tol);
  }
}

void cmd_simulate(Run& run, const RunConfig& cfg) {
  const Lift lift(cfg.model, cfg.sim);
  SimConfig sim = cfg.sim;
  if (sim.record_grid.empty()) sim.record_grid = {sim.horizon};
  const auto ens = simulate_paths(lift, sim, cfg.seed);
  {
    auto ts = run.open("trajectories.csv");
    write_trajectories_csv(ts, ens);
  }
  const auto curve = moment_curve(ens);
  {
    auto cs = run.open("moment_curve.csv");
    write_moment_curve_csv(cs, curve);
  }
  const double start = mass_norm(lift, init_state(lift));
  run.at_most("max moment / initial norm", max_of(curve.mean) / start, 10.0);
}

void cmd_stationarity(Run& run, const RunConfig& cfg) {
  const auto& e = cfg.experiment;
  const Lift lift(cfg.model, cfg.sim);
  const auto kb = kb_average(lift, cfg.sim, e.kb_T, e.kb_samples, cfg.seed);
  const auto rep = stationarity_test(lift, cfg.sim, kb, e.offset_h, cfg.seed);

  AffineModel quiet = cfg.model;
  std::fill(quiet.sigma.begin(), quiet.sigma.end(), 0.0);
  const Lift control_lift(quiet, cfg.sim);
  const auto control =
      stationarity_test(control_lift, cfg.sim, dirac_measure(control_lift, e.kb_samples), e.offset_h, cfg.seed);

  auto os = run.open("stationarity.csv");
  csv::Writer w(os);
  w.header({"component", "case", "T_or_offset", "W1", "noise_floor", "pass_flag"});
  for (std::size_t r = 0; r < rep.rows.size(); ++r) {
    const auto& row = rep.rows[r];
    const std::string comp = "component " + std::to_string(row.component + 1);
    const double bound = e.w1_factor * row.noise_floor;
    w.field(row.component + 1).field("kb_restart").field(e.offset_h).field(row.w1).field(row.noise_floor)
        .field(row.w1 <= bound ? 1 : 0).end_row();
    run.at_most(comp + " W1 after restart", row.w1, bound);

    const auto& c = control.rows[r];
    if (row.component < cfg.model.d_tilde) {
      const double need = e.power_factor * row.noise_floor;
      w.field(c.component + 1).field("dirac_control").field(e.offset_h).field(c.w1).field(row.noise_floor)
          .field(c.w1 >= need ? 1 : 0).end_row();
      run.at_least(comp + " W1 of the noiseless Dirac control", c.w1, need);
    }
  }
}

}  // namespace

int run_subcommand(const std::string& name, const RunConfig& cfg, const std::filesystem::path& out_dir,
                   std::ostream& log) {
  if (std::find(subcommand_names().begin(), subcommand_names().end(), name) == subcommand_names().end()) {
    log << "unknown subcommand '" << name << "'\n";
    return kExitInvalid;
  }
  if (name != "validate") {
    const auto v = validate(cfg.model);
    if (!v.empty()) {
      log << "invalid model:\n" << describe(v);
      write_failure_report(out_dir, name, kExitInvalid, "invalid model", v);
      return kExitInvalid;
    }
  }
  try {
    Run run(name, cfg, out_dir, log);
    if (name == "validate") cmd_validate(run, cfg);
    else if (name == "kernel-check") cmd_kernel_check(run, cfg);
    else if (name == "mean-check") cmd_mean_check(run, cfg);
    else if (name == "laplace-check") cmd_laplace_check(run, cfg);
    else if (name == "bound-check") cmd_bound_check(run, cfg);
    else if (name == "simulate") cmd_simulate(run, cfg);
    else cmd_stationarity(run, cfg);
    return run.finish();
  } catch (const DomainError& ex) {
    log << "error: " << ex.what() << '\n';
    write_failure_report(out_dir, name, kExitInvalid, ex.what());
    return kExitInvalid;
  } catch (const std::exception& ex) {
    log << "error: " << ex.what() << '\n';
    write_failure_report(out_dir, name, kExitError, ex.what());
    return kExitError;
  }
}

void write_failure_report(const std::filesystem::path& out_dir, const std::string& name, int code,
                          const std::string& error, const std::vector<Violation>& violations) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["subcommand"] = name;
  j["exit_code"] = code;
  j["error"] = error;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : violations) j["violations"].push_back({{"clause", v.clause}, {"message", v.message}});
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream(out_dir / "failure.json", std::ios::binary) << j.dump(2) << '\n';
}

}  // namespace svlift

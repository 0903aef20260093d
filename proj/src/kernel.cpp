#include "svlift/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <string>

#include "svlift/csv.hpp"
#include "svlift/errors.hpp"
#include "svlift/special_functions.hpp"

namespace svlift {
namespace {

void check_component(const KernelSpec& spec, std::size_t i) {
  if (i >= spec.dimension()) throw DomainError("kernel: component index out of range");
}

// Antiderivatives in y = x - delta of y^{-a} and of y^{1-a}.
double mass_primitive(double a, double y) { return std::pow(y, 1.0 - a) / (1.0 - a); }
double moment_primitive(double a, double y) { return std::pow(y, 2.0 - a) / (2.0 - a); }

double nu_normalizer(double a) { return reciprocal_gamma(a) * reciprocal_gamma(1.0 - a); }

}  // namespace

void check_kernel(const KernelSpec& spec) {
  if (spec.alpha.empty()) throw DomainError("kernel: at least one component is required");
  for (std::size_t i = 0; i < spec.alpha.size(); ++i) {
    const double a = spec.alpha[i];
    if (!(a > 0.5 && a <= 1.0))
      throw DomainError("kernel: alpha[" + std::to_string(i) + "] = " + std::to_string(a) +
                        " outside (1/2, 1]");
  }
  if (!std::isfinite(spec.delta) || spec.delta < 0.0)
    throw DomainError("kernel: delta must be finite and nonnegative");
  if (spec.delta == 0.0 && !spec.oracle_mode)
    throw DomainError("kernel: delta = 0 is only permitted in oracle mode");
}

double DiscretizedMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double DiscretizedMeasure::laplace(double t) const {
  double s = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * std::exp(-nodes[j] * t);
  return s;
}

double nu_density(const KernelSpec& spec, std::size_t i, double x) {
  check_component(spec, i);
  const double a = spec.alpha[i];
  if (x <= spec.delta || a >= 1.0) return 0.0;
  return std::pow(x - spec.delta, -a) * nu_normalizer(a);
}

double nu_mass(const KernelSpec& spec, std::size_t i, double lo, double hi) {
  check_component(spec, i);
  if (lo < spec.delta || hi < lo) throw DomainError("nu_mass: need delta <= lo <= hi");
  const double a = spec.alpha[i];
  if (a >= 1.0) return (lo <= spec.delta && spec.delta <= hi) ? 1.0 : 0.0;
  if (std::isinf(hi)) return std::numeric_limits<double>::infinity();
  return (mass_primitive(a, hi - spec.delta) - mass_primitive(a, lo - spec.delta)) * nu_normalizer(a);
}

double kernel_eval(const KernelSpec& spec, std::size_t i, double t) {
  check_component(spec, i);
  if (!(t > 0.0)) throw DomainError("kernel_eval: t must be positive");
  const double a = spec.alpha[i];
  return std::pow(t, a - 1.0) * std::exp(-spec.delta * t) / gamma_fn(a);
}

double kernel_integral(const KernelSpec& spec, std::size_t i, double t) {
  check_component(spec, i);
  if (!(t >= 0.0)) throw DomainError("kernel_integral: t must be nonnegative");
  if (t == 0.0) return 0.0;
  const double a = spec.alpha[i];
  if (spec.delta == 0.0) return std::pow(t, a) / gamma_fn(a + 1.0);
  return std::pow(spec.delta, -a) * lower_incomplete_gamma(a, spec.delta * t) / gamma_fn(a);
}

DiscretizedMeasure discretize_measure(const KernelSpec& spec, std::size_t i, std::size_t n_nodes,
                                      double x_max) {
  check_kernel(spec);
  check_component(spec, i);
  if (spec.delta <= 0.0) throw DomainError("discretize_measure: requires delta > 0");
  if (n_nodes < 1) throw DomainError("discretize_measure: n_nodes must be at least 1");
  if (!(x_max > spec.delta) || !std::isfinite(x_max))
    throw DomainError("discretize_measure: x_max must be finite and exceed delta");

  DiscretizedMeasure m;
  m.component = i;
  const double a = spec.alpha[i];
  if (a >= 1.0) {
    m.nodes = {spec.delta};
    m.weights = {1.0};
    return m;
  }

  const double width = x_max - spec.delta;
  std::vector<double> breaks(n_nodes + 1, 0.0);
  breaks[n_nodes] = width;
  if (n_nodes > 1) {
    const double first = std::min(kFirstBreakWidth, 0.5 * width);
    const double log_ratio = std::log(width / first) / static_cast<double>(n_nodes - 1);
    for (std::size_t k = 1; k < n_nodes; ++k)
      breaks[k] = first * std::exp(log_ratio * static_cast<double>(k - 1));
  }

  const double c = nu_normalizer(a);
  m.nodes.reserve(n_nodes);
  m.weights.reserve(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double lo = breaks[k];
    const double hi = breaks[k + 1];
    const double mass = mass_primitive(a, hi) - mass_primitive(a, lo);
    const double first_moment = moment_primitive(a, hi) - moment_primitive(a, lo);
    m.weights.push_back(mass * c);
    m.nodes.push_back(spec.delta + first_moment / mass);
  }
  return m;
}

DiscretizedMeasure discretize_measure(const KernelSpec& spec, std::size_t i, std::size_t n_nodes) {
  return discretize_measure(spec, i, n_nodes, spec.delta + kDefaultTailWidth);
}

double discretization_error(const KernelSpec& spec, const DiscretizedMeasure& m,
                            std::size_t n_points) {
  double worst = 0.0;
  const double lo = std::log(m.t_min);
  const double hi = std::log(m.t_max);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double frac = n_points > 1 ? static_cast<double>(k) / static_cast<double>(n_points - 1) : 0.0;
    const double t = std::exp(lo + (hi - lo) * frac);
    const double exact = kernel_eval(spec, m.component, t);
    worst = std::max(worst, std::abs(m.laplace(t) - exact) / exact);
  }
  return worst;
}

double damped_nu_moment(const KernelSpec& spec, std::size_t i, double tau, MomentPower power) {
  check_kernel(spec);
  check_component(spec, i);
  if (!(tau > 0.0)) throw DomainError("damped_nu_moment: tau must be positive");
  const double a = spec.alpha[i];
  const double damping = std::exp(-2.0 * spec.delta * tau);
  if (power == MomentPower::Zero)
    return std::pow(2.0, a - 1.0) * std::pow(tau, a - 1.0) * damping / gamma_fn(a);
  return gamma_fn(1.5 - a) * std::pow(2.0 * tau, a - 1.5) * damping * nu_normalizer(a);
}

void write_measure_csv(std::ostream& os, const DiscretizedMeasure& m) {
  csv::Writer w(os);
  w.header({"node", "weight"});
  for (std::size_t j = 0; j < m.size(); ++j) w.field(m.nodes[j]).field(m.weights[j]).end_row();
}

DiscretizedMeasure read_measure_csv(std::istream& is, std::size_t component) {
  const auto table = csv::read(is);
  if (table.empty() || table[0].size() != 2 || table[0][0] != "node" || table[0][1] != "weight")
    throw DomainError("read_measure_csv: expected header 'node,weight'");
  DiscretizedMeasure m;
  m.component = component;
  for (std::size_t r = 1; r < table.size(); ++r) {
    if (table[r].size() != 2) throw DomainError("read_measure_csv: row " + std::to_string(r) + " malformed");
    const double x = std::stod(table[r][0]);
    const double w = std::stod(table[r][1]);
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("read_measure_csv: weights must be positive");
    if (!m.nodes.empty() && !(x > m.nodes.back()))
      throw DomainError("read_measure_csv: nodes must be strictly increasing");
    m.nodes.push_back(x);
    m.weights.push_back(w);
  }
  return m;
}

}  // namespace svlift

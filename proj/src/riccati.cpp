#include "svlift/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "svlift/csv.hpp"
#include "svlift/errors.hpp"
#include "svlift/quadrature.hpp"
#include "svlift/special_functions.hpp"

namespace svlift {
namespace {

constexpr double kMeanRelTol = 1e-10;

// int_0^{t^alpha} weight(s) e^{-delta s} E_{alpha,alpha}(-beta r) dr with s = r^{1/alpha}.
// Breaks sit where mittag_leffler changes evaluation branch, then at powers
// of 4, so every piece has a smooth interior.
template <class F>
double substituted_integral(const SqrtParams& p, double t, F&& weight) {
  const double upper = std::pow(t, p.alpha);
  const MLParams ml{p.alpha, p.alpha};
  auto f = [&](double r) {
    const double s = std::pow(r, 1.0 / p.alpha);
    return weight(s) * std::exp(-p.delta * s) * mittag_leffler(ml, -p.beta * r);
  };
  std::vector<double> cuts{0.0, 2.0 / p.beta, -kMLAsymptoticThreshold / p.beta};
  for (double c = 1.0; c < upper; c *= 4.0) cuts.push_back(c);
  cuts.push_back(upper);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size() && cuts[k] < upper; ++k) {
    const double hi = std::min(cuts[k + 1], upper);
    if (hi > cuts[k]) total += quad::integrate_singular(f, cuts[k], hi, kMeanRelTol, 1e-13);
  }
  return total;
}

double integral_of_kernel(double alpha, double delta, double t) {
  if (t == 0.0) return 0.0;
  if (delta == 0.0) return std::pow(t, alpha) / gamma_fn(alpha + 1.0);
  return std::pow(delta, -alpha) * lower_incomplete_gamma(alpha, delta * t) / gamma_fn(alpha);
}

// int_0^t s K(s) ds
double first_moment_of_kernel(double alpha, double delta, double t) {
  if (t == 0.0) return 0.0;
  if (delta == 0.0) return std::pow(t, alpha + 1.0) / ((alpha + 1.0) * gamma_fn(alpha));
  return std::pow(delta, -alpha - 1.0) * lower_incomplete_gamma(alpha + 1.0, delta * t) / gamma_fn(alpha);
}

// int_0^t K(s)^2 ds
double integral_of_kernel_squared(double alpha, double delta, double t) {
  if (t == 0.0) return 0.0;
  const double g2 = gamma_fn(alpha) * gamma_fn(alpha);
  if (delta == 0.0) return std::pow(t, 2.0 * alpha - 1.0) / ((2.0 * alpha - 1.0) * g2);
  return std::pow(2.0 * delta, 1.0 - 2.0 * alpha) * lower_incomplete_gamma(2.0 * alpha - 1.0, 2.0 * delta * t) / g2;
}

double kernel_value(double alpha, double delta, double t) {
  return std::pow(t, alpha - 1.0) * std::exp(-delta * t) / gamma_fn(alpha);
}

}  // namespace

void check_params(const SqrtParams& p) {
  if (!(p.alpha > 0.5 && p.alpha <= 1.0)) throw DomainError("riccati: alpha must lie in (1/2, 1]");
  if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) throw DomainError("riccati: delta must be >= 0");
  if (!(p.beta > 0.0)) throw DomainError("riccati: beta must be positive");
  if (!(p.sigma >= 0.0)) throw DomainError("riccati: sigma must be >= 0");
  if (!(p.v0 >= 0.0)) throw DomainError("riccati: V0 must be >= 0");
}

double expected_mass(const SqrtParams& p, double t) {
  check_params(p);
  if (!(t >= 0.0)) throw DomainError("expected_mass: t must be >= 0");
  if (t == 0.0 || p.v0 == 0.0) return p.v0;
  const double integral = substituted_integral(p, t, [](double) { return 1.0; });
  return p.v0 * (1.0 - p.beta / p.alpha * integral);
}

double expected_mass_limit(double v0, double beta, double alpha, double delta) {
  if (!(delta >= 0.0) || !(beta > 0.0)) throw DomainError("expected_mass_limit: need delta >= 0, beta > 0");
  return v0 * (1.0 - beta / (beta + std::pow(delta, alpha)));
}

double fed_component_mean(const SqrtParams& p, double m0, double coupling, double alpha_out, double t) {
  check_params(p);
  if (!(t >= 0.0)) throw DomainError("fed_component_mean: t must be >= 0");
  if (t == 0.0 || coupling == 0.0) return m0;
  auto f = [&](double s) {
    const double lag = t - s;
    if (lag <= 0.0) return alpha_out == 1.0 ? expected_mass(p, t) : 0.0;
    return kernel_value(alpha_out, p.delta, lag) * expected_mass(p, s);
  };
  const double conv = alpha_out == 1.0 ? quad::integrate(f, 0.0, t, 1e-10, 1e-14)
                                       : quad::integrate_singular(f, 0.0, t, 1e-9, 1e-14);
  return m0 - coupling * conv;
}

RiccatiSolution solve_riccati(const SqrtParams& p, double u, double T, std::size_t n_steps) {
  check_params(p);
  if (!(u <= 0.0)) throw DomainError("solve_riccati: u must be <= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("solve_riccati: T must be positive");
  if (n_steps < 2) throw DomainError("solve_riccati: need at least 2 steps");

  const double a = p.alpha;
  const double dl = p.delta;
  const double s2 = p.sigma * p.sigma;
  const std::size_t M = n_steps;
  const double h = T / static_cast<double>(M);

  RiccatiSolution sol;
  sol.params = p;
  sol.u = u;
  sol.dt = h;
  sol.t.resize(M + 1);
  for (std::size_t n = 0; n <= M; ++n) sol.t[n] = h * static_cast<double>(n);

  // Convolution weights by lag: I0 = int K over the cell, I1 = int K (s - l h)/h.
  std::vector<double> I0(M), I1(M);
  I0[0] = integral_of_kernel(a, dl, h);
  I1[0] = first_moment_of_kernel(a, dl, h) / h;
  using GL = boost::math::quadrature::gauss<double, 10>;
  for (std::size_t l = 1; l < M; ++l) {
    const double lo = h * static_cast<double>(l);
    I0[l] = GL::integrate([&](double s) { return kernel_value(a, dl, s); }, lo, lo + h);
    I1[l] = GL::integrate([&](double s) { return kernel_value(a, dl, s) * (s - lo) / h; }, lo, lo + h);
  }

  // Closed-form forcing: K*K and K*K^2.
  const double ga = gamma_fn(a);
  const double g2a = gamma_fn(2.0 * a);
  const double beta_2a1 = boost::math::beta(a, 2.0 * a - 1.0);
  std::vector<double> K(M + 1, 0.0), base(M + 1, 0.0);
  for (std::size_t n = 1; n <= M; ++n) {
    const double t = sol.t[n];
    K[n] = kernel_value(a, dl, t);
    const double kk = std::pow(t, 2.0 * a - 1.0) * std::exp(-dl * t) / g2a;
    double kkk = 0.0;
    if (s2 != 0.0 && u != 0.0) {
      // int_0^1 (1-v)^{a-1} v^{2a-2} e^{-delta t v} dv = B(a, 2a-1) 1F1(2a-1; 3a-1; -delta t)
      const double m = boost::math::hypergeometric_1F1(2.0 * a - 1.0, 3.0 * a - 1.0, -dl * t);
      kkk = std::exp(-dl * t) * std::pow(t, 3.0 * a - 2.0) * beta_2a1 * m / (ga * ga * ga);
    }
    base[n] = -p.beta * u * kk + 0.5 * s2 * u * u * kkk;
  }

  auto remainder = [&](std::size_t n, double hv) { return -p.beta * hv + s2 * u * K[n] * hv + 0.5 * s2 * hv * hv; };

  std::vector<double> H(M + 1, 0.0), G(M + 1, 0.0);
  const double c_new = I0[0] - I1[0];
  for (std::size_t n = 1; n <= M; ++n) {
    double hist = G[n - 1] * I1[0];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t l = n - k - 1;
      hist += G[k + 1] * (I0[l] - I1[l]) + G[k] * I1[l];
    }
    const double known = base[n] + hist;
    // implicit step hv = known + c (A hv + sigma^2 hv^2 / 2), solved exactly with
    // the root that tends to `known` as c -> 0
    const double lin = 1.0 - c_new * (-p.beta + s2 * u * K[n]);
    const double disc = lin * lin - 2.0 * c_new * s2 * known;
    if (!(disc >= 0.0) || !(lin > 0.0))
      throw NumericError("solve_riccati: implicit step has no real root at t = " + std::to_string(sol.t[n]) +
                         " (grid too coarse)");
    const double hv = 2.0 * known / (lin + std::sqrt(disc));
    if (!std::isfinite(hv)) throw NumericError("solve_riccati: solution blew up at t = " + std::to_string(sol.t[n]));
    H[n] = hv;
    G[n] = remainder(n, hv);
  }

  sol.psi.resize(M + 1);
  sol.r_of_psi.resize(M + 1);
  sol.log_transform.resize(M + 1);
  sol.psi[0] = a == 1.0 ? u : 0.0;
  double trap = 0.0;
  for (std::size_t n = 0; n <= M; ++n) {
    if (n > 0) {
      sol.psi[n] = u * K[n] + H[n];
      trap += 0.5 * h * (G[n - 1] + G[n]);
    }
    const double ps = sol.psi[n];
    sol.r_of_psi[n] = -p.beta * ps + 0.5 * s2 * ps * ps;
    const double t = sol.t[n];
    const double integral_r = -p.beta * u * integral_of_kernel(a, dl, t) +
                              0.5 * s2 * u * u * integral_of_kernel_squared(a, dl, t) + trap;
    sol.log_transform[n] = p.v0 * (u + integral_r);
  }
  return sol;
}

double laplace_transform(const SqrtParams& p, double u, double t, std::size_t n_steps) {
  if (t == 0.0) return std::exp(u * p.v0);
  if (u == 0.0) return 1.0;
  const auto sol = solve_riccati(p, u, t, n_steps);
  return std::exp(sol.log_transform.back());
}

void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol) {
  csv::Writer w(os);
  w.header({"t", "psi", "R_of_psi", "running_log_transform"});
  for (std::size_t n = 0; n < sol.t.size(); ++n)
    w.field(sol.t[n]).field(sol.psi[n]).field(sol.r_of_psi[n]).field(sol.log_transform[n]).end_row();
}

BoundIntegral bound_integral(const SqrtParams& p, double mu, double t) {
  check_params(p);
  if (!(p.delta > 0.0)) throw DomainError("bound_integral: delta must be positive");
  if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("bound_integral: mu must lie in (0, 1]");
  if (!(t >= 0.0)) throw DomainError("bound_integral: t must be >= 0");
  const double two_delta = 2.0 * p.delta;
  const double scale = std::pow(two_delta, -mu);
  BoundIntegral out;
  out.limit = p.v0 * scale * gamma_fn(mu) * (1.0 - p.beta / (p.beta + std::pow(p.delta, p.alpha)));
  if (t == 0.0 || p.v0 == 0.0) return out;
  const double inner = substituted_integral(
      p, t, [&](double s) { return s < t ? lower_incomplete_gamma(mu, two_delta * (t - s)) : 0.0; });
  out.value = p.v0 * scale * (lower_incomplete_gamma(mu, two_delta * t) - p.beta / p.alpha * inner);
  return out;
}

}  // namespace svlift

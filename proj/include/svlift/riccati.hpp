#pragma once

// Analytic oracles for a square-root component
//   V_t = V0 - beta int_0^t K(t-s) V_s ds + sigma int_0^t K(t-s) sqrt(V_s) dW_s,
// K(t) = t^{alpha-1} e^{-delta t} / Gamma(alpha): the mean, the Laplace
// transform through the Riccati-Volterra equation
//   psi = u K + K * R(psi),   R(psi) = -beta psi + sigma^2 psi^2 / 2,
// and the damped integral of the mean used to bound moments.

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace svlift {

struct SqrtParams {
  double v0 = 1.0;
  double beta = 1.0;
  double sigma = 0.3;
  double alpha = 0.75;
  double delta = 1.0;  // 0 allowed for the analytic formulas only
};

void check_params(const SqrtParams& p);

// E[V_t] = V0 (1 - beta int_0^t e^{-delta s} s^{alpha-1} E_{alpha,alpha}(-beta s^alpha) ds)
double expected_mass(const SqrtParams& p, double t);

// V0 (1 - beta / (beta + delta^alpha))
double expected_mass_limit(double v0, double beta, double alpha, double delta);

// Mean of an OU-type component fed by the square-root one:
// m0 - coupling * int_0^t K_out(t-s) E[V_s] ds with K_out(t) = t^{a_out-1} e^{-delta t} / Gamma(a_out).
double fed_component_mean(const SqrtParams& p, double m0, double coupling, double alpha_out, double t);

struct RiccatiSolution {
  SqrtParams params;
  double u = 0.0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> psi;  // psi[0] is 0 by convention when alpha < 1 (K is singular there)
  std::vector<double> r_of_psi;
  std::vector<double> log_transform;  // V0 (u + int_0^t R(psi_s) ds)
};

// Product-trapezoid predictor-corrector on a uniform grid of n_steps cells.
// The singular parts u K, beta u K*K and sigma^2 u^2 K*K^2 / 2 are handled in
// closed form; only the bounded remainder is discretized.
RiccatiSolution solve_riccati(const SqrtParams& p, double u, double T, std::size_t n_steps);

// E[exp(u Vbar_t)] from a solve on [0, t].
double laplace_transform(const SqrtParams& p, double u, double t, std::size_t n_steps);

// CSV columns t, psi, R_of_psi, running_log_transform.
void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol);

struct BoundIntegral {
  double value = 0.0;
  double limit = 0.0;
};

// int_0^t e^{-2 delta (t-s)} (t-s)^{mu-1} E[V_s] ds in closed form, together with
// its limit V0 (2 delta)^{-mu} Gamma(mu) (1 - beta / (beta + delta^alpha)).
BoundIntegral bound_integral(const SqrtParams& p, double mu, double t);

}  // namespace svlift

#include "svlift/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "svlift/errors.hpp"
#include "svlift/quadrature.hpp"

namespace svlift {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 500;
constexpr double kSeriesStop = 1e-16;
constexpr double kTargetRelError = 1e-9;
// The series is trusted without further checks only for |z| below this.
constexpr double kSeriesRadius = 2.0;

void check_params(MLParams p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0))
    throw DomainError("mittag_leffler: alpha must lie in (0, 1], got " + std::to_string(p.alpha));
  if (!(p.beta > 0.0) || !std::isfinite(p.beta))
    throw DomainError("mittag_leffler: beta must be positive, got " + std::to_string(p.beta));
}

// E_{1,b}(z) for z < 0 via E_{1,b}(z) = 1/Gamma(b-1) int_0^1 e^{zs} (1-s)^{b-2} ds
// (b > 1) and the upward recurrence E_{1,b} = 1/Gamma(b) + z E_{1,b+1} for b <= 1.
double ml_alpha_one_negative(double beta, double z) {
  if (beta == 1.0) return std::exp(z);
  if (beta == 2.0) return std::expm1(z) / z;
  if (beta < 1.0) return reciprocal_gamma(beta) + z * ml_alpha_one_negative(beta + 1.0, z);
  auto f = [&](double s) { return std::exp(z * s) * std::pow(1.0 - s, beta - 2.0); };
  return quad::integrate_singular(f, 0.0, 1.0, 1e-13) * reciprocal_gamma(beta - 1.0);
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

double reciprocal_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

double lower_incomplete_gamma(double mu, double z) {
  if (!(mu > 0.0)) throw DomainError("lower_incomplete_gamma: mu must be positive");
  if (!(z >= 0.0)) throw DomainError("lower_incomplete_gamma: z must be nonnegative");
  if (z == 0.0) return 0.0;
  const double full = std::tgamma(mu);
  if (std::isinf(z)) return full;

  // log of the common prefactor z^mu e^{-z}
  const double log_pref = mu * std::log(z) - z;
  if (z < mu + 1.0) {
    // gamma(mu, z) = z^mu e^{-z} sum_n z^n / (mu (mu+1) ... (mu+n))
    double term = 1.0 / mu;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= z / (mu + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::exp(log_pref) * sum;
  }
  // Gamma(mu, z) by the modified Lentz continued fraction.
  constexpr double tiny = 1e-300;
  double b = z + 1.0 - mu;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - mu);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return full - std::exp(log_pref) * h;
}

namespace detail {

SeriesResult ml_series(MLParams p, double z) {
  SeriesResult r;
  if (z == 0.0) {
    r.value = reciprocal_gamma(p.beta);
    r.terms = 1;
    r.converged = true;
    return r;
  }
  const double log_abs_z = std::log(std::abs(z));
  double sum = 0.0;
  double abs_sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double arg = p.alpha * n + p.beta;
    // arg > 0 always, so Gamma(arg) > 0 and lgamma is the log of it
    const double mag = std::exp(n * log_abs_z - std::lgamma(arg));
    const double term = (z < 0.0 && (n % 2 == 1)) ? -mag : mag;
    sum += term;
    abs_sum += mag;
    r.terms = n + 1;
    if (mag <= prev && mag < kSeriesStop * std::abs(sum)) {
      r.converged = true;
      break;
    }
    prev = mag;
  }
  r.value = sum;
  r.rel_error = sum != 0.0 ? kEps * abs_sum / std::abs(sum) : std::numeric_limits<double>::infinity();
  return r;
}

double ml_asymptotic(MLParams p, double z, int terms) {
  // E_{a,b}(z) ~ -sum_{k=1}^{m} z^{-k} / Gamma(b - k a), valid on the negative axis
  double sum = 0.0;
  double zk = 1.0;
  for (int k = 1; k <= terms; ++k) {
    zk /= z;
    sum -= zk * reciprocal_gamma(p.beta - k * p.alpha);
  }
  return sum;
}

double ml_integral(MLParams p, double z) {
  if (!(z < 0.0)) throw DomainError("ml_integral: requires z < 0");
  const double a = p.alpha;
  if (a >= 1.0) return ml_alpha_one_negative(p.beta, z);
  // Reduce b below 1 + a: E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
  if (p.beta >= 1.0 + a) {
    const double lower = ml_integral({a, p.beta - a}, z);
    return (lower - reciprocal_gamma(p.beta - a)) / z;
  }
  const double b = p.beta;
  const double pi = std::numbers::pi;
  const double s1 = std::sin(pi * (1.0 - b));
  const double s2 = std::sin(pi * (1.0 - b + a));
  const double cs = std::cos(pi * a);
  const double expo = (1.0 - b) / a;
  auto kernel = [&](double chi) {
    if (chi <= 0.0) return 0.0;
    const double num = chi * s1 - z * s2;
    const double den = chi * chi - 2.0 * chi * z * cs + z * z;
    return std::pow(chi, expo) * std::exp(-std::pow(chi, 1.0 / a)) * num / den;
  };
  const double split = -z;
  const double head = quad::integrate_singular(kernel, 0.0, split, 1e-13);
  const double tail = quad::integrate_to_infinity(kernel, split, 1e-13);
  return (head + tail) / (a * pi);
}

}  // namespace detail

double mittag_leffler(MLParams p, double z) {
  check_params(p);
  if (!std::isfinite(z)) throw DomainError("mittag_leffler: z must be finite");
  if (z == 0.0) return reciprocal_gamma(p.beta);

  if (z >= 0.0 || std::abs(z) <= kSeriesRadius) {
    const auto s = detail::ml_series(p, z);
    if (s.converged && s.rel_error <= kTargetRelError) return s.value;
    if (z > 0.0)
      throw AccuracyLossError("mittag_leffler: series did not converge for z=" + std::to_string(z));
  }
  if (p.alpha == 1.0) return ml_alpha_one_negative(p.beta, z);
  if (z < kMLAsymptoticThreshold) {
    const double v = detail::ml_asymptotic(p, z);
    // magnitude of the first omitted term serves as the error estimate
    const double next = std::pow(std::abs(z), -(kMLAsymptoticTerms + 1)) *
                        std::abs(reciprocal_gamma(p.beta - (kMLAsymptoticTerms + 1) * p.alpha));
    if (next <= kTargetRelError * std::abs(v)) return v;
  }
  return detail::ml_integral(p, z);
}

}  // namespace svlift

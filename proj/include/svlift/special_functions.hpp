#pragma once

// Scalar special functions shared by every analytic oracle: Gamma, the lower
// incomplete gamma function and the two-parameter Mittag-Leffler function
// E_{a,b}(z) = sum_n z^n / Gamma(a n + b) for real z.

namespace svlift {

struct MLParams {
  double alpha = 1.0;  // (0, 1]
  double beta = 1.0;   // > 0
};

double gamma_fn(double x);

// 1/Gamma(x) for any real x; zero at the poles 0, -1, -2, ...
double reciprocal_gamma(double x);

// gamma(mu, z) = int_0^z e^{-k} k^{mu-1} dk. z may be +inf.
double lower_incomplete_gamma(double mu, double z);

double mittag_leffler(MLParams p, double z);

// Series below this value are replaced by the algebraic asymptotic expansion.
inline constexpr double kMLAsymptoticThreshold = -50.0;
inline constexpr int kMLAsymptoticTerms = 10;

namespace detail {

// Evaluation branches, exposed so tests can compare them at crossovers.
struct SeriesResult {
  double value = 0.0;
  double rel_error = 0.0;  // rounding estimate eps * sum|terms| / |value|
  int terms = 0;
  bool converged = false;
};
SeriesResult ml_series(MLParams p, double z);
double ml_asymptotic(MLParams p, double z, int terms = kMLAsymptoticTerms);
// Real-line integral representation; requires z < 0.
double ml_integral(MLParams p, double z);

}  // namespace detail
}  // namespace svlift

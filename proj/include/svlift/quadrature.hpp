#pragma once

// Thin adapters over Boost.Math quadrature with a uniform error policy:
// every routine throws QuadratureError when the reported error estimate
// exceeds the requested relative tolerance (with a small absolute floor).

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "svlift/errors.hpp"

namespace svlift::quad {

inline constexpr double kDefaultRelTol = 1e-12;
inline constexpr double kAbsFloor = 1e-300;

namespace detail {
inline void check(const char* who, double value, double err, double rel_tol, double abs_tol) {
  if (!std::isfinite(value) || err > std::max(rel_tol * std::abs(value), abs_tol) * 10.0) {
    throw QuadratureError(std::string(who) + ": no convergence (value=" + std::to_string(value) +
                          ", error=" + std::to_string(err) + ")");
  }
}
}  // namespace detail

// Adaptive Gauss-Kronrod (15/31) on a finite interval. Suited to smooth
// integrands or mild (cusp-type) endpoint behaviour.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = kDefaultRelTol,
                 double abs_tol = kAbsFloor) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol, &err);
  detail::check("gauss_kronrod", v, err, rel_tol, abs_tol);
  return v;
}

// Double-exponential rule on a finite interval; handles integrable
// singularities at either endpoint.
template <class F>
double integrate_singular(F&& f, double a, double b, double rel_tol = kDefaultRelTol,
                          double abs_tol = kAbsFloor) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double err = 0.0;
  const double v = rule.integrate(f, a, b, rel_tol, &err);
  detail::check("tanh_sinh", v, err, rel_tol, abs_tol);
  return v;
}

// Double-exponential rule on [a, inf).
template <class F>
double integrate_to_infinity(F&& f, double a, double rel_tol = kDefaultRelTol,
                             double abs_tol = kAbsFloor) {
  thread_local boost::math::quadrature::exp_sinh<double> rule(12);
  double err = 0.0;
  const double v = rule.integrate([&](double x) { return f(a + x); }, rel_tol, &err);
  detail::check("exp_sinh", v, err, rel_tol, abs_tol);
  return v;
}

}  // namespace svlift::quad

#pragma once

// Affine coefficients b_i(x) = -sum_k beta_ik x_k and
// sigma_ij(x) = sum_k sigma_ijk sqrt(x_k), with the block structure that makes
// the first d_tilde components square-root processes on R_+ and the remaining
// ones OU-type components driven by them.

#include <cstddef>
#include <string>
#include <vector>

#include "svlift/kernel.hpp"

namespace svlift {

enum class InitialKind { DiracAtZero, DiracPlusPower };

struct InitialCondition {
  InitialKind kind = InitialKind::DiracAtZero;
  std::vector<double> v0;
  // Only used by DiracPlusPower; must lie in (0, 1 - alpha_i) for every
  // square-root component.
  double mu_exponent = 0.0;

  bool operator==(const InitialCondition&) const = default;
};

struct AffineModel {
  std::size_t d = 1;
  std::size_t d_tilde = 1;
  std::size_t m = 1;
  std::vector<double> beta;   // d x d, row-major
  std::vector<double> sigma;  // d x m x d
  std::vector<double> c;      // d x m x d, has to vanish
  KernelSpec kernel;
  InitialCondition initial;

  // Allocates zeroed coefficient arrays of the right shape.
  static AffineModel zeros(std::size_t d, std::size_t d_tilde, std::size_t m);

  double& b(std::size_t i, std::size_t k) { return beta[i * d + k]; }
  double b(std::size_t i, std::size_t k) const { return beta[i * d + k]; }
  double& s(std::size_t i, std::size_t j, std::size_t k) { return sigma[(i * m + j) * d + k]; }
  double s(std::size_t i, std::size_t j, std::size_t k) const { return sigma[(i * m + j) * d + k]; }
  double offset(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * m + j) * d + k]; }
  bool is_square_root(std::size_t i) const { return i < d_tilde; }
  bool operator==(const AffineModel&) const = default;
};

struct Violation {
  std::string clause;  // "a".."f", or "shape"
  std::string message;
};

std::vector<Violation> validate(const AffineModel& model);
std::string describe(const std::vector<Violation>& violations);

// g_i(t): contribution of the initial measure, <e^{-t.}, lambda_0^i>.
double initial_curve(const AffineModel& model, std::size_t i, double t);
// (1/dt) int_t^{t+dt} g_i.  Equals g_i(t) for DiracAtZero.
double initial_curve_average(const AffineModel& model, std::size_t i, double t, double dt);

std::vector<double> drift(const AffineModel& model, const std::vector<double>& x);
std::vector<double> diffusion_row(const AffineModel& model, std::size_t i, const std::vector<double>& x);

AffineModel preset_rough_heston_1d(double beta, double sigma, double alpha, double delta, double v0);

// Components are ordered (variance, price) so that the square-root block comes
// first: index 0 is the variance, index 1 the log-price with alpha = 1.
AffineModel preset_rough_heston_2d(double beta, double sigma, double rho, double alpha, double delta,
                                   double v0, double p0);

inline constexpr std::size_t kHestonVariance = 0;
inline constexpr std::size_t kHestonPrice = 1;

}  // namespace svlift

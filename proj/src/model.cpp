#include "svlift/model.hpp"

#include <cmath>
#include <sstream>

#include "svlift/errors.hpp"
#include "svlift/special_functions.hpp"

namespace svlift {
namespace {

std::string idx(std::size_t i) { return std::to_string(i + 1); }

double power_part_exponent(const AffineModel& model, std::size_t i) {
  return model.kernel.alpha[i] + model.initial.mu_exponent - 1.0;
}

}  // namespace

AffineModel AffineModel::zeros(std::size_t d, std::size_t d_tilde, std::size_t m) {
  AffineModel model;
  model.d = d;
  model.d_tilde = d_tilde;
  model.m = m;
  model.beta.assign(d * d, 0.0);
  model.sigma.assign(d * m * d, 0.0);
  model.c.assign(d * m * d, 0.0);
  model.kernel.alpha.assign(d, 1.0);
  model.initial.v0.assign(d, 0.0);
  return model;
}

std::vector<Violation> validate(const AffineModel& model) {
  std::vector<Violation> out;
  const std::size_t d = model.d;
  const std::size_t m = model.m;
  if (d < 1 || m < 1 || model.d_tilde > d) {
    out.push_back({"shape", "need d >= 1, m >= 1 and 0 <= d_tilde <= d"});
    return out;
  }
  if (model.beta.size() != d * d) out.push_back({"shape", "beta must have d*d entries"});
  if (model.sigma.size() != d * m * d) out.push_back({"shape", "sigma must have d*m*d entries"});
  if (model.c.size() != d * m * d) out.push_back({"shape", "c must have d*m*d entries"});
  if (model.kernel.alpha.size() != d) out.push_back({"shape", "kernel needs one alpha per component"});
  if (model.initial.v0.size() != d) out.push_back({"shape", "V0 needs d entries"});
  if (!out.empty()) return out;

  for (std::size_t i = 0; i < d; ++i) {
    const double v = model.initial.v0[i];
    if (!std::isfinite(v)) out.push_back({"a", "V0_" + idx(i) + " is not finite"});
    else if (model.is_square_root(i) && v < 0.0)
      out.push_back({"a", "V0_" + idx(i) + " = " + std::to_string(v) + " must be >= 0 on the square-root block"});
  }
  if (model.initial.kind == InitialKind::DiracPlusPower) {
    for (std::size_t i = 0; i < model.d_tilde; ++i) {
      const double mu = model.initial.mu_exponent;
      const double a = model.kernel.alpha[i];
      if (!(mu > 0.0 && mu < 1.0 - a))
        out.push_back({"a", "mu = " + std::to_string(mu) + " must lie in (0, 1 - alpha_" + idx(i) + ")"});
    }
  }

  for (std::size_t i = 0; i < d; ++i) {
    const double a = model.kernel.alpha[i];
    if (!(a > 0.5 && a <= 1.0))
      out.push_back({"b", "alpha_" + idx(i) + " = " + std::to_string(a) + " outside (1/2, 1]"});
  }
  if (!(model.kernel.delta > 0.0) || !std::isfinite(model.kernel.delta))
    out.push_back({"b", "delta = " + std::to_string(model.kernel.delta) + " must be > 0"});

  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < d; ++k)
        if (model.offset(i, j, k) != 0.0)
          out.push_back({"c", "c_" + idx(i) + idx(j) + idx(k) + " must be 0"});

  for (std::size_t i = 0; i < model.d_tilde; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (k == i) continue;
      if (model.b(i, k) != 0.0)
        out.push_back({"d", "beta_" + idx(i) + idx(k) + " must be 0 for a square-root row"});
      for (std::size_t j = 0; j < m; ++j)
        if (model.s(i, j, k) != 0.0)
          out.push_back({"d", "sigma_" + idx(i) + idx(j) + idx(k) + " must be 0 for a square-root row"});
    }

  for (std::size_t i = model.d_tilde; i < d; ++i)
    for (std::size_t k = model.d_tilde; k < d; ++k) {
      if (model.b(i, k) != 0.0)
        out.push_back({"e", "beta_" + idx(i) + idx(k) + " must be 0 between OU components"});
      for (std::size_t j = 0; j < m; ++j)
        if (model.s(i, j, k) != 0.0)
          out.push_back({"e", "sigma_" + idx(i) + idx(j) + idx(k) + " must be 0 between OU components"});
    }

  for (std::size_t i = 0; i < model.d_tilde; ++i) {
    if (!(model.b(i, i) > 0.0)) out.push_back({"f", "beta_" + idx(i) + idx(i) + " must be > 0"});
    for (std::size_t k = 0; k < model.d_tilde; ++k)
      if (k != i && model.b(i, k) < 0.0)
        out.push_back({"f", "beta_" + idx(i) + idx(k) + " must be >= 0"});
  }
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (const auto& v : violations) os << "clause (" << v.clause << "): " << v.message << '\n';
  return os.str();
}

double initial_curve(const AffineModel& model, std::size_t i, double t) {
  const double v0 = model.initial.v0[i];
  if (model.initial.kind == InitialKind::DiracAtZero || !model.is_square_root(i)) return v0;
  if (!(t > 0.0)) throw DomainError("initial_curve: power part is singular at t = 0");
  const double e = power_part_exponent(model, i);
  return v0 + gamma_fn(-e) * std::pow(t, e);
}

double initial_curve_average(const AffineModel& model, std::size_t i, double t, double dt) {
  const double v0 = model.initial.v0[i];
  if (model.initial.kind == InitialKind::DiracAtZero || !model.is_square_root(i)) return v0;
  const double e1 = power_part_exponent(model, i) + 1.0;
  return v0 + gamma_fn(1.0 - e1) * (std::pow(t + dt, e1) - std::pow(t, e1)) / (e1 * dt);
}

std::vector<double> drift(const AffineModel& model, const std::vector<double>& x) {
  if (x.size() != model.d) throw DomainError("drift: state has wrong length");
  std::vector<double> out(model.d, 0.0);
  for (std::size_t i = 0; i < model.d; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < model.d; ++k) acc -= model.b(i, k) * x[k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> diffusion_row(const AffineModel& model, std::size_t i, const std::vector<double>& x) {
  if (x.size() != model.d) throw DomainError("diffusion_row: state has wrong length");
  if (i >= model.d) throw DomainError("diffusion_row: component out of range");
  std::vector<double> out(model.m, 0.0);
  for (std::size_t j = 0; j < model.m; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < model.d; ++k) {
      const double s = model.s(i, j, k);
      if (s == 0.0) continue;
      if (x[k] < 0.0)
        throw DomainError("diffusion_row: negative state x_" + idx(k) + " under a square root");
      acc += s * std::sqrt(x[k]);
    }
    out[j] = acc;
  }
  return out;
}

AffineModel preset_rough_heston_1d(double beta, double sigma, double alpha, double delta, double v0) {
  if (!(beta > 0.0) || !(sigma >= 0.0) || !(alpha > 0.5 && alpha <= 1.0) || !(delta > 0.0) || !(v0 >= 0.0))
    throw DomainError("preset_rough_heston_1d: parameter out of range");
  AffineModel model = AffineModel::zeros(1, 1, 1);
  model.b(0, 0) = beta;
  model.s(0, 0, 0) = sigma;
  model.kernel.alpha = {alpha};
  model.kernel.delta = delta;
  model.initial.v0 = {v0};
  return model;
}

AffineModel preset_rough_heston_2d(double beta, double sigma, double rho, double alpha, double delta,
                                   double v0, double p0) {
  if (!(beta > 0.0) || !(sigma >= 0.0) || !(alpha > 0.5 && alpha <= 1.0) || !(delta > 0.0) ||
      !(v0 >= 0.0) || !(std::abs(rho) <= 1.0) || !std::isfinite(p0))
    throw DomainError("preset_rough_heston_2d: parameter out of range");
  AffineModel model = AffineModel::zeros(2, 1, 2);
  const std::size_t v = kHestonVariance;
  const std::size_t p = kHestonPrice;
  model.b(v, v) = beta;
  model.b(p, v) = 0.5;
  model.s(v, 1, v) = sigma;
  model.s(p, 0, v) = std::sqrt(1.0 - rho * rho);
  model.s(p, 1, v) = rho;
  model.kernel.alpha = {alpha, 1.0};
  model.kernel.delta = delta;
  model.initial.v0 = {v0, p0};
  return model;
}

}  // namespace svlift

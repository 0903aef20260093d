#pragma once

// Fractional mixing measures nu^i(dx) = (x - delta)^{-a_i} 1{x > delta} dx / (Gamma(a_i) Gamma(1 - a_i)),
// their Laplace transforms K^i(t) = t^{a_i - 1} e^{-delta t} / Gamma(a_i), and the
// finite-rank discretizations that drive the Markovian lift.
//
// For a_i = 1 the measure degenerates to a unit point mass at x = delta, so
// K^i(t) = e^{-delta t}; the density is then reported as zero and the
// discretization is that single atom.

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace svlift {

struct KernelSpec {
  std::vector<double> alpha;  // one exponent per component, each in (1/2, 1]
  double delta = 1.0;         // shared damping, > 0
  // Permits delta == 0 for closed-form evaluation only; discretization refuses it.
  bool oracle_mode = false;

  std::size_t dimension() const { return alpha.size(); }
  bool operator==(const KernelSpec&) const = default;
};

// Throws DomainError if the spec breaks its invariants.
void check_kernel(const KernelSpec& spec);

inline constexpr double kDefaultTailWidth = 1e6;   // x_max = delta + this
inline constexpr double kFirstBreakWidth = 1e-3;   // first cell is (delta, delta + this]
inline constexpr double kValidityTMin = 0.01;
inline constexpr double kValidityTMax = 50.0;

struct DiscretizedMeasure {
  std::size_t component = 0;
  std::vector<double> nodes;    // rate constants, strictly increasing, >= delta
  std::vector<double> weights;  // masses, strictly positive
  double t_min = kValidityTMin;
  double t_max = kValidityTMax;

  std::size_t size() const { return nodes.size(); }
  double total_mass() const;
  // sum_j w_j e^{-x_j t}
  double laplace(double t) const;
};

double nu_density(const KernelSpec& spec, std::size_t i, double x);

// nu^i((a, b]) in closed form; a, b >= delta.
double nu_mass(const KernelSpec& spec, std::size_t i, double a, double b);

double kernel_eval(const KernelSpec& spec, std::size_t i, double t);

// int_0^t K^i(s) ds, closed form through the lower incomplete gamma function.
double kernel_integral(const KernelSpec& spec, std::size_t i, double t);

DiscretizedMeasure discretize_measure(const KernelSpec& spec, std::size_t i, std::size_t n_nodes,
                                      double x_max);
DiscretizedMeasure discretize_measure(const KernelSpec& spec, std::size_t i, std::size_t n_nodes);

// sup over a log-spaced grid on [t_min, t_max] of |K_N(t) - K(t)| / K(t).
double discretization_error(const KernelSpec& spec, const DiscretizedMeasure& m,
                            std::size_t n_points = 200);

enum class MomentPower { Zero, Half };

// Damped moments of nu^i at lag tau:
//   Zero: int e^{-2 x tau} nu(dx)                = 2^{a-1} tau^{a-1} e^{-2 delta tau} / Gamma(a)
//   Half: int e^{-2 x tau} (x - delta)^{1/2} nu(dx) = Gamma(3/2 - a) (2 tau)^{a - 3/2} e^{-2 delta tau}
//                                                     / (Gamma(a) Gamma(1 - a))
double damped_nu_moment(const KernelSpec& spec, std::size_t i, double tau, MomentPower power);

// CSV with header "node,weight".
void write_measure_csv(std::ostream& os, const DiscretizedMeasure& m);
DiscretizedMeasure read_measure_csv(std::istream& is, std::size_t component);

}  // namespace svlift

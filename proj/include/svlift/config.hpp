#pragma once

// Run configuration: a TOML subset with sections [kernel], [model], [sim] and
// [experiment].  Values are numbers, "strings", booleans and (nested) arrays;
// arrays may span lines.  Example:
//
//   [kernel]
//   alpha = [0.75]
//   delta = 1.0
//   [model]
//   d_tilde = 1
//   beta = [[1.0]]
//   sigma = [[[0.3]]]      # sigma[i][j][k]
//   V0 = [1.0]

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svlift/lift_sim.hpp"
#include "svlift/model.hpp"

namespace svlift {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries the clause label of every violation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> v);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

namespace toml {

struct Value {
  enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
  std::string text;  // raw token for numbers, contents for strings
  double number = 0.0;
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

// Keys are "section.key".
using Document = std::map<std::string, Value>;

Document parse(std::string_view text);

}  // namespace toml

struct ExperimentParams {
  // kernel-check
  std::size_t check_nodes = 40;
  std::size_t check_points = 200;
  double kernel_tol = 1e-2;
  // mean-check / laplace-check
  std::vector<double> mean_times{1.0, 5.0, 20.0};
  double z_gate = 3.0;
  double u = -1.0;
  std::vector<double> laplace_times{1.0, 5.0};
  std::size_t riccati_steps = 4000;
  // bound-check
  double mu = 0.25;
  std::vector<double> bound_times{1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
  double bound_tol = 0.05;
  double bound_from = 50.0;
  // stationarity
  double kb_T = 100.0;
  std::size_t kb_samples = 10000;
  double offset_h = 10.0;
  double w1_factor = 2.0;
  double power_factor = 5.0;

  bool operator==(const ExperimentParams&) const = default;
};

struct RunConfig {
  AffineModel model;
  SimConfig sim;
  ExperimentParams experiment;
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

// Parses without running validate(); shape problems are still ConfigErrors.
RunConfig parse_config_unchecked(std::string_view text);

// Parses and validates.  Throws ConfigError (with line numbers) or ValidationError.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::string& path);

std::string serialize_config(const RunConfig& config);

}  // namespace svlift

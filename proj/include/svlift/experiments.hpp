#pragma once

// Named experiments behind the command-line tool.  Each one writes its CSV
// artifacts, a gates.csv (gate, value, threshold, pass) and a manifest into
// the output directory.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "svlift/config.hpp"
#include "svlift/riccati.hpp"

namespace svlift {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitPass = 0, kExitGateFailed = 1, kExitInvalid = 2, kExitError = 3 };

const std::vector<std::string>& subcommand_names();

// Runs one experiment.  Progress and failures go to log.
int run_subcommand(const std::string& name, const RunConfig& config, const std::filesystem::path& out_dir,
                   std::ostream& log);

// failure.json in out_dir: subcommand, exit_code, error and any model
// violations as {clause, message} objects.
void write_failure_report(const std::filesystem::path& out_dir, const std::string& name, int code,
                          const std::string& error, const std::vector<Violation>& violations = {});

// Square-root component i of the model as a one-dimensional parameter set.
SqrtParams sqrt_params(const AffineModel& model, std::size_t i);

// E[Vbar_i(t)] for any component of a DiracAtZero model.
double analytic_mean(const AffineModel& model, std::size_t i, double t);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace svlift

#pragma once

#include "viscodecay/analysis.hpp"
#include "viscodecay/runspec.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace viscodecay {

/// Exit codes of every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConditionsUnmet = 2;

struct CommandResult {
  int exit_code = kExitOk;
  Json report;
  /// Extra artifacts as (file name, contents).
  std::vector<std::pair<std::string, std::string>> files;
};

/// Everything the commands derive from a spec before simulating.
struct Prepared {
  Model model;
  Field u0;
  Field u1;
  Admissibility admissibility;
  double B = 0.0;
  double E0 = 0.0;
  double lambda0 = 0.0;
  /// Set when the potential-well constants are defined (b > 0, p1 > 2, l > 0).
  std::optional<StableSetConstants> constants;
  std::string constants_reason;
};

Prepared prepare(const RunSpec& spec);

/// Constants, decay and blow-up conditions, and the decay constant K.
CommandResult command_check(const RunSpec& spec);
/// Trajectory CSV plus outcome and monotonicity audit.
CommandResult command_simulate(const RunSpec& spec);
/// check, then simulate, envelope, invariant-set audit and decay fit.
CommandResult command_verify(const RunSpec& spec);
/// Simulates and fits the decay class of E(t).
CommandResult command_fit(const RunSpec& spec);
/// Fits the decay class of a trajectory CSV.
CommandResult command_fit_csv(const std::string& csv_text);

struct SweepAxis {
  std::string key;
  /// Each entry is parsed like an --override value.
  std::vector<std::string> values;
};

/// Runs `command` over the cartesian product of the axes, first axis slowest,
/// on `jobs` worker threads. Output order does not depend on scheduling.
CommandResult command_sweep(const Json& base, const std::vector<SweepAxis>& axes,
                            const std::string& command, unsigned jobs);

/// Full command line, argv[0] included. Writes the JSON report to `out`,
/// diagnostics to `err`, and artifacts under --out when given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace viscodecay

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardcore::cli {

// Exit codes: 0 = success, 1 = usage or runtime error, 2 = the computation
// finished but the scientific question came back Undetermined (level cap hit,
// non-monotone indicator, unclassifiable transition).  Scripts can branch on
// the distinction.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndetermined = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by parse_and_validate when --help is requested; carries the help
// text for the innermost command so main can print it and exit 0.
struct HelpRequested {
  std::string text;
};

struct NumericOptions {
  double tol = 1e-12;
  double gap_tol = 1e-8;
  long max_levels = 100000;
};

struct OutputOptions {
  std::string format = "json";  // csv | json
  std::string path;             // empty = stdout
};

// Everything a single run needs, filled by parse_and_validate.  Fields not
// used by the selected command keep their defaults.
struct RunConfig {
  std::string command;
  int b = 2;
  int C = 1;
  double lambda = 1.0;
  int depth = 3;
  std::string bc = "empty";  // empty | full | const:K
  NumericOptions numeric;
  OutputOptions output;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency

  // fixpoints
  std::string map_name = "J2";  // J | J2 | H
  double gamma = 3.0;
  double kappa = -1.0;  // >= 0 switches J2 to the damped map

  // critical / order
  std::string bracket = "2,8";
  double bracket_tol = 1e-6;
  double lambda_cr = 0.0;
  std::vector<double> offsets = {1e-2, 1e-3, 1e-4};

  // scan
  std::string grid;  // lo:hi:n

  // sample
  long sweeps = 2000;
  long burn_in = 500;

  // simulate
  std::string graph = "k2";  // single | k2 | complete:K | path:K | cycle:K
  long events = 100000;

  std::vector<std::string> warnings;  // config-file overrides, regime notes
};

// Parses `args` (without the program name) into a validated RunConfig.
// Accepts an ini-style `--config FILE` whose keys mirror the long flags;
// command-line flags win over file values with a recorded warning.  Throws
// UsageError naming the offending field on invalid input.
RunConfig parse_and_validate(const std::vector<std::string>& args);

// Dispatches the command, writes CSV or JSON to the configured destination
// (falling back to `out`), and returns an exit code.  Runtime errors from the
// engine surface as UsageError-free exceptions handled by main.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full program: parse, run, map errors to exit codes, honour --help.
int main(int argc, char** argv);

}  // namespace hardcore::cli

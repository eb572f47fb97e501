// Subcommands of the lyapguard executable.
//
// Exit codes:
//   0   success (monitor: Stable throughout; check: Theorem)
//   1   usage or I/O error
//   2   configuration error
//   3   simulation aborted at a singularity / chart exit
//   4   malformed trajectory CSV
//   5   prover unavailable or failed to start
//   10  monitor reached Warning
//   20  monitor reached Violation
//   21  check: CounterSatisfiable
//   22  check: GaveUp or Timeout
//   23  check: prover output had no recognised SZS status
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lyapguard/fof.hpp"
#include "lyapguard_cli/config.hpp"

namespace lyapguard::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConfig = 2;
inline constexpr int kSingularity = 3;
inline constexpr int kBadCsv = 4;
inline constexpr int kProverUnavailable = 5;
inline constexpr int kWarning = 10;
inline constexpr int kViolation = 20;
inline constexpr int kCounterSatisfiable = 21;
inline constexpr int kGaveUp = 22;
inline constexpr int kProverError = 23;
}  // namespace exit_code

struct SimulateArgs {
  std::string config;
  std::string out;  // overrides output.csv
};

struct MonitorArgs {
  std::string config;
  std::string in;   // trajectory CSV ("-" for stdin); ignored with live
  bool live = false;
  std::string out;  // transition log; overrides output.transitions; stdout if neither
};

struct EmitArgs {
  std::string config;
  std::vector<double> E;
  int branch = 15;
  std::string name;  // default Stability_Eq15 / Stability_Eq16
  std::string out;   // overrides output.tptp; stdout if neither
};

struct CheckArgs {
  EmitArgs emit;
  std::string prover;  // falls back to $LYAPGUARD_PROVER
  double timeout_s = 60.0;
  std::vector<std::string> prover_args;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_monitor(const MonitorArgs& args, std::ostream& out, std::ostream& err);
int cmd_emit_fof(const EmitArgs& args, std::ostream& out, std::ostream& err);
int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream& err);

/// Builds the conjecture cmd_emit_fof would write.
FofConjecture build_conjecture(const RunConfig& cfg, const Vec6& E, Branch branch,
                               const std::string& name);

/// Branch for the --branch flag value (15 or 16).
Branch branch_from_equation(int equation);

/// "Transition" record as one JSON line.
std::string transition_json(const Transition& tr);

/// Full command line (argv[0] included) dispatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lyapguard::cli

// External ATP invocation and SZS status interpretation.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyapguard/errors.hpp"
#include "lyapguard/fof.hpp"

namespace lyapguard {

enum class SzsStatus { Theorem, CounterSatisfiable, GaveUp, Timeout, Error };

std::string_view to_string(SzsStatus status);

struct SzsResult {
  SzsStatus status = SzsStatus::Error;
  std::string raw;         // captured stdout and stderr
  double wall_time = 0.0;  // [s]
  int exit_status = -1;    // wait status decoded to an exit code, -1 if killed
};

/// The prover binary is missing or not executable.
class ProverUnavailable : public Error {
 public:
  using Error::Error;
};

/// Word after the first "SZS status" on any line; nullopt if absent.
std::optional<std::string> find_szs_word(std::string_view output);

/// Maps the first SZS status word; anything missing or unrecognised is Error.
SzsStatus parse_szs_status(std::string_view output);

struct ProverOptions {
  std::vector<std::string> extra_args;  // placed before the problem path
  double timeout_s = 60.0;
};

/// Resolves a bare name through PATH; throws ProverUnavailable.
std::string resolve_prover(const std::string& path);

/// Writes the rendered conjecture to a private temp file, runs
///   prover [extra_args...] <problem.p>
/// and reads stdout/stderr until exit or timeout (then SIGKILL, status Timeout).
SzsResult run_prover(const std::string& prover, const FofConjecture& conj,
                     const ProverOptions& options = {});

}  // namespace lyapguard

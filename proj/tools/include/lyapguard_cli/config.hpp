// Run configuration: one JSON document, unknown keys rejected.
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lyapguard/controller.hpp"
#include "lyapguard/dynamics.hpp"
#include "lyapguard/errors.hpp"
#include "lyapguard/gains.hpp"
#include "lyapguard/monitor.hpp"
#include "lyapguard/simulator.hpp"

namespace lyapguard::cli {

/// Malformed or invalid configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct VBoundCoefficients {
  Vec3 rate_coeff = Vec3::Ones();
  Vec3 angle_coeff = Vec3::Ones();

  bool operator==(const VBoundCoefficients&) const = default;
};

struct MonitorSettings {
  int debounce_n = 5;
  double e_floor = 1e-3;
  int divider = 1;
  Envelope envelope;

  bool operator==(const MonitorSettings&) const = default;
};

struct OutputPaths {
  std::string csv;
  std::string transitions;
  std::string tptp;

  bool operator==(const OutputPaths&) const = default;
};

struct RunConfig {
  PlantParams plant;
  Gains gains;
  RobustBounds bounds;
  std::optional<VBoundCoefficients> v_bound;  // absent: coefficients equal the gains
  Scenario scenario;  // scenario.mismatch is the "estimates.mismatch" key
  MonitorSettings monitor;
  OutputPaths output;

  VBoundTemplate v_bound_template() const;
  MonitorConfig monitor_config() const;

  /// Every component invariant plus sup ||eta_d''|| < H over the horizon.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses without validating; throws ConfigError on syntax, type or unknown keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const RunConfig& cfg);

}  // namespace lyapguard::cli

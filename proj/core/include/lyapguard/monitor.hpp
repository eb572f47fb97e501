// Streaming stability monitor.
//
// Each sample is checked against the robustness assumptions
//   ||dd|| <= D,  ||d|| + D < D_bar,  ||dN|| <= S,  ||eta_d''|| < H,
//   ||I - Jhat J^{-1}|| <= xi,  beta_min <= ||J^{-1}|| <= beta_max
// and against the Lyapunov decrease condition V'(E) < 0. Violated samples
// drive a debounced Stable -> Warning -> Violation state machine.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyapguard/controller.hpp"
#include "lyapguard/dynamics.hpp"
#include "lyapguard/lyapunov.hpp"

namespace lyapguard {

enum class Cause : std::uint8_t {
  LyapunovPositive = 0,
  DisturbanceBound,
  DeltaNBound,
  RefAccelBound,
  InertiaMismatchBound,
  JInvNormBound,
  EnvelopeExit,
};

inline constexpr int kCauseCount = 7;

std::string_view to_string(Cause cause);
std::optional<Cause> cause_from_string(std::string_view text);

/// Small bitset over Cause.
class CauseSet {
 public:
  CauseSet() = default;
  static CauseSet from_bits(std::uint32_t bits) { CauseSet s; s.bits_ = bits; return s; }

  void insert(Cause c) { bits_ |= bit(c); }
  bool contains(Cause c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::uint32_t bits() const { return bits_; }
  std::vector<Cause> list() const;

  CauseSet& operator|=(const CauseSet& other) { bits_ |= other.bits_; return *this; }
  bool operator==(const CauseSet&) const = default;

 private:
  static std::uint32_t bit(Cause c) { return 1u << static_cast<unsigned>(c); }
  std::uint32_t bits_ = 0;
};

enum class VerdictState { Stable, Warning, Violation };

std::string_view to_string(VerdictState state);

/// Angle box within which the model and certificate are trusted.
struct Envelope {
  double max_roll = kGimbalLimit;
  double max_pitch = kGimbalLimit;

  bool operator==(const Envelope&) const = default;
};

struct MonitorConfig {
  PlantParams plant;
  RobustBounds bounds;
  LyapunovCert cert{Gains{}};
  ModelEstimates estimates;
  std::optional<VBoundTemplate> v_bound;  // defaults to VBoundTemplate::matched
  int debounce_n = 5;
  double e_floor = 1e-3;
  Envelope envelope;
  int divider = 1;  // evaluate every divider-th sample

  /// Throws InvalidArgument on debounce_n < 1, e_floor < 0, divider < 1 or
  /// missing estimates.
  void validate() const;
};

/// What the monitor needs from one control step.
struct MonitorSample {
  double t = 0.0;
  Vec3 eta = Vec3::Zero();
  Vec3 eta_dot = Vec3::Zero();
  Vec3 eta_d_ddot = Vec3::Zero();
  Vec3 d = Vec3::Zero();
  Vec6 E = Vec6::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();
};

/// Margins are bound - value; the disturbance assumption is reported as three
/// sub-checks (sum, estimate_error, magnitude) under "DisturbanceBound.*".
struct AssumptionReport {
  CauseSet violated;
  std::map<std::string, double> margins;
};

AssumptionReport check_assumptions(const MonitorConfig& cfg, const MonitorSample& sample);

struct LyapunovCheck {
  double v_dot = 0.0;
  double margin = 0.0;  // worst-case V' over admissible v
  Branch branch = Branch::BoundaryLayer;
  bool violated = false;
};

/// Violated iff V' >= 0 and ||E|| > e_floor.
LyapunovCheck check_lyapunov(const MonitorConfig& cfg, const MonitorSample& sample);

struct Verdict {
  VerdictState state = VerdictState::Stable;
  CauseSet causes;
  double t = 0.0;
  std::map<std::string, double> details;
};

struct Transition {
  double t = 0.0;
  VerdictState from = VerdictState::Stable;
  VerdictState to = VerdictState::Stable;
  CauseSet causes;
  std::map<std::string, double> margins;
};

struct MonitorState {
  VerdictState state = VerdictState::Stable;
  int consecutive_bad = 0;
  int consecutive_clean = 0;
  long samples_seen = 0;
  std::optional<double> last_t;
  bool reached_warning = false;
  bool reached_violation = false;

  bool operator==(const MonitorState&) const = default;
};

struct FeedResult {
  MonitorState next;
  std::vector<Transition> transitions;  // at most two (debounce_n == 1)
  std::optional<Verdict> verdict;       // evaluation of this sample, if taken
};

/// Pure transition function. Throws InvalidArgument on decreasing timestamps.
FeedResult feed(const MonitorConfig& cfg, const MonitorState& state, const MonitorSample& sample);

/// Evaluates one sample without touching the state machine.
Verdict evaluate_sample(const MonitorConfig& cfg, const MonitorSample& sample);

/// Debounce logic alone: advances the state for one evaluated sample.
FeedResult advance(const MonitorConfig& cfg, const MonitorState& state, const Verdict& verdict);

/// Exit code contract: 0 stable throughout, 10 reached Warning, 20 reached Violation.
int exit_code(const MonitorState& state);

class Monitor {
 public:
  explicit Monitor(MonitorConfig cfg);

  std::vector<Transition> feed(const MonitorSample& sample);

  const MonitorState& state() const noexcept { return state_; }
  const MonitorConfig& config() const noexcept { return cfg_; }
  int exit_code() const { return lyapguard::exit_code(state_); }

 private:
  MonitorConfig cfg_;
  MonitorState state_;
};

}  // namespace lyapguard

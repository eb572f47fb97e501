// Fixed-step closed-loop simulation: classical RK4 on the attitude dynamics,
// controller evaluated once per step and held (zero-order hold) unless the
// scenario asks for continuous control, commanded torque routed through the
// rotor mixer so actuator limits apply.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lyapguard/controller.hpp"
#include "lyapguard/dynamics.hpp"
#include "lyapguard/lyapunov.hpp"
#include "lyapguard/monitor.hpp"

namespace lyapguard {

/// One entry of the disturbance schedule.
///   Constant: value on [start, end).
///   Gust:     raised-cosine pulse, value * (1 - cos(2 pi (t - start) / width)) / 2
///             on [start, start + width].
///   Random:   piecewise-constant torque, each axis uniform in [-value, value],
///             redrawn every `hold` seconds on [start, end), seeded per scenario.
struct DisturbanceSegment {
  enum class Kind { Constant, Gust, Random };
  Kind kind = Kind::Constant;
  double start = 0.0;
  double end = 0.0;
  double width = 0.0;
  double hold = 0.0;
  Vec3 value = Vec3::Zero();

  bool operator==(const DisturbanceSegment&) const = default;
};

class DisturbanceSchedule {
 public:
  DisturbanceSchedule() = default;
  DisturbanceSchedule(std::vector<DisturbanceSegment> segments, std::uint64_t seed);

  DisturbanceTorque at(double t) const;

  const std::vector<DisturbanceSegment>& segments() const noexcept { return segments_; }

 private:
  std::vector<DisturbanceSegment> segments_;
  std::vector<std::vector<Vec3>> random_levels_;  // per segment, per hold interval
};

struct Scenario {
  double duration = 10.0;
  double dt = 1e-3;
  Vec3 initial_eta = Vec3::Zero();
  Vec3 initial_eta_dot = Vec3::Zero();
  Reference reference;
  std::vector<DisturbanceSegment> disturbance;
  double mismatch = 0.0;
  std::uint64_t seed = 0;
  double thrust = 4.3;     // collective thrust held constant [N]
  bool open_loop = false;  // tau = 0; plant free response under d
  /// Re-evaluates the controller at every RK4 stage instead of holding it
  /// over the step. Logged rows are the same quantities either way.
  bool continuous_control = false;

  /// Throws InvalidArgument on dt <= 0, duration < dt, segments outside
  /// [0, duration], initial state outside the chart.
  void validate() const;

  /// floor(duration / dt) + 1; duration/dt within 1e-9 of an integer rounds to it.
  std::size_t sample_count() const;

  bool operator==(const Scenario&) const = default;
};

/// One row of the trajectory log.
struct LogSample {
  double t = 0.0;
  Vec3 eta = Vec3::Zero();
  Vec3 eta_dot = Vec3::Zero();
  Vec3 eta_d = Vec3::Zero();
  Vec3 e = Vec3::Zero();
  Vec3 e_dot = Vec3::Zero();
  Vec6 E = Vec6::Zero();
  Vec3 tau = Vec3::Zero();  // applied (after mixing)
  Vec4 omega = Vec4::Zero();
  Vec3 d = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();
  double V = 0.0;
  double V_dot = 0.0;
  Branch branch = Branch::BoundaryLayer;
  bool saturated = false;
  std::uint32_t assumption_flags = 0;  // CauseSet bits from check_assumptions

  // Not serialized.
  Vec3 tau_command = Vec3::Zero();
  Vec3 u = Vec3::Zero();

  bool operator==(const LogSample&) const = default;
};

struct TrajectoryLog {
  std::vector<LogSample> samples;
  bool aborted = false;
  std::string abort_reason;
};

struct StepResult {
  EulerState next;
  LogSample sample;
};

class Simulator {
 public:
  /// The monitor envelope tags log rows with assumption markers.
  Simulator(PlantParams plant, Gains gains, RobustBounds bounds, VBoundTemplate tmpl,
            Scenario scenario, Envelope envelope = {}, const Mat6& P = Mat6::Identity());

  /// Controller sample at (state, t) plus one RK4 step of length dt.
  StepResult step(const EulerState& state, double t) const;

  /// Log row for (state, t) without integrating.
  LogSample sample_at(const EulerState& state, double t) const;

  /// Streams samples to sink; returns the log status (samples left empty).
  TrajectoryLog run(const std::function<void(const LogSample&)>& sink) const;

  TrajectoryLog run() const;

  const PlantParams& plant() const noexcept { return plant_; }
  const Scenario& scenario() const noexcept { return scenario_; }
  const RobustController& controller() const noexcept { return controller_; }
  const DisturbanceSchedule& disturbance() const noexcept { return schedule_; }
  const MonitorConfig& assumption_config() const noexcept { return assumptions_; }

 private:
  struct Held {
    ControlOutput control;
    Torque applied;
    MixResult mix;
  };
  Held hold_control(const EulerState& state, double t) const;
  LogSample make_sample(const EulerState& state, double t, const Held& held) const;
  EulerState integrate(const EulerState& state, double t, const Held& held) const;

  PlantParams plant_;
  Scenario scenario_;
  RobustController controller_;
  DisturbanceSchedule schedule_;
  MonitorConfig assumptions_;
};

/// Builds a monitor sample (eta_d'' taken from the reference at t).
MonitorSample to_monitor_sample(const LogSample& row, const Reference& reference);

}  // namespace lyapguard

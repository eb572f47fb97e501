#include "lyapguard/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "lyapguard/errors.hpp"

namespace lyapguard {
namespace {

// Portable uniform draw in [-1, 1) from a 64-bit engine output.
double signed_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

std::size_t interval_count(double span, double hold) {
  return static_cast<std::size_t>(std::ceil(span / hold - 1e-9)) + 1;
}

}  // namespace

DisturbanceSchedule::DisturbanceSchedule(std::vector<DisturbanceSegment> segments,
                                         std::uint64_t seed)
    : segments_(std::move(segments)) {
  random_levels_.resize(segments_.size());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const DisturbanceSegment& seg = segments_[i];
    if (seg.kind != DisturbanceSegment::Kind::Random) continue;
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (i + 1));
    const std::size_t n = interval_count(seg.end - seg.start, seg.hold);
    random_levels_[i].reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      Vec3 level;
      for (int a = 0; a < 3; ++a) level(a) = seg.value(a) * signed_unit(rng);
      random_levels_[i].push_back(level);
    }
  }
}

DisturbanceTorque DisturbanceSchedule::at(double t) const {
  DisturbanceTorque d;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const DisturbanceSegment& seg = segments_[i];
    switch (seg.kind) {
      case DisturbanceSegment::Kind::Constant:
        if (t >= seg.start && t < seg.end) d.value += seg.value;
        break;
      case DisturbanceSegment::Kind::Gust:
        if (t >= seg.start && t <= seg.start + seg.width) {
          const double phase = 2.0 * std::numbers::pi * (t - seg.start) / seg.width;
          d.value += seg.value * 0.5 * (1.0 - std::cos(phase));
        }
        break;
      case DisturbanceSegment::Kind::Random:
        if (t >= seg.start && t < seg.end) {
          auto k = static_cast<std::size_t>(std::floor((t - seg.start) / seg.hold));
          k = std::min(k, random_levels_[i].size() - 1);
          d.value += random_levels_[i][k];
        }
        break;
    }
  }
  return d;
}

void Scenario::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw InvalidArgument("scenario.dt must be > 0");
  if (!(std::isfinite(duration) && duration >= dt)) {
    throw InvalidArgument("scenario.duration must be >= dt");
  }
  if (!(std::isfinite(thrust) && thrust >= 0.0)) {
    throw InvalidArgument("scenario.thrust must be >= 0");
  }
  if (!std::isfinite(mismatch) || mismatch <= -1.0) {
    throw InvalidArgument("scenario.mismatch must be > -1");
  }
  if (!in_chart(initial_eta, initial_eta_dot)) {
    throw InvalidArgument("scenario.initial state outside the Euler chart");
  }
  for (const auto& seg : disturbance) {
    if (!seg.value.allFinite()) throw InvalidArgument("disturbance values must be finite");
    double last = seg.end;
    switch (seg.kind) {
      case DisturbanceSegment::Kind::Gust:
        if (!(seg.width > 0.0)) throw InvalidArgument("gust width must be > 0");
        last = seg.start + seg.width;
        break;
      case DisturbanceSegment::Kind::Random:
        if (!(seg.hold > 0.0)) throw InvalidArgument("random segment hold must be > 0");
        [[fallthrough]];
      case DisturbanceSegment::Kind::Constant:
        if (!(seg.end >= seg.start)) throw InvalidArgument("segment end must be >= start");
        break;
    }
    if (!(seg.start >= 0.0) || !(last <= duration)) {
      throw InvalidArgument("disturbance segment outside [0, duration]");
    }
  }
}

std::size_t Scenario::sample_count() const {
  const double ratio = duration / dt;
  const double nearest = std::round(ratio);
  const double steps = std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest
                                                                                   : std::floor(ratio);
  return static_cast<std::size_t>(steps) + 1;
}

Simulator::Simulator(PlantParams plant, Gains gains, RobustBounds bounds, VBoundTemplate tmpl,
                     Scenario scenario, Envelope envelope, const Mat6& P)
    : plant_(plant),
      scenario_(std::move(scenario)),
      controller_(gains, bounds, tmpl, ModelEstimates::scaled(plant, scenario_.mismatch), P),
      schedule_(scenario_.disturbance, scenario_.seed) {
  plant_.validate();
  scenario_.validate();
  assumptions_.plant = plant_;
  assumptions_.bounds = bounds;
  assumptions_.cert = controller_.cert();
  assumptions_.estimates = controller_.estimates();
  assumptions_.v_bound = tmpl;
  assumptions_.envelope = envelope;
}

Simulator::Held Simulator::hold_control(const EulerState& state, double t) const {
  Held held;
  held.control = controller_.compute(state, scenario_.reference.at(t));
  Torque command = held.control.tau;
  if (scenario_.open_loop) command.value.setZero();
  held.control.tau = command;
  held.mix = rotors_from_torque(plant_, command, scenario_.thrust, MixPolicy::Clamp);
  held.applied = torque_from_rotors(plant_, held.mix.rotors);
  return held;
}

LogSample Simulator::make_sample(const EulerState& state, double t, const Held& held) const {
  const ReferenceSample ref = scenario_.reference.at(t);
  const ControlOutput& c = held.control;
  const DisturbanceTorque d = schedule_.at(t);

  LogSample s;
  s.t = t;
  s.eta = state.eta();
  s.eta_dot = state.eta_dot();
  s.eta_d = ref.eta_d;
  s.E = c.E;
  s.e = c.E.head<3>();
  s.e_dot = c.E.tail<3>();
  s.tau = held.applied.value;
  s.tau_command = c.tau.value;
  s.u = c.u;
  s.omega = held.mix.rotors.omega;
  s.d = d.value;
  s.v = uncertainty_v(plant_, controller_.estimates(), state, c.u, d);
  s.gamma = scenario_.open_loop ? Vec3::Zero() : c.gamma;
  s.V = v_of(controller_.cert(), c.E);
  const Mat3 j_inv = j_inverse(plant_, state.eta());
  const VdotResult vd =
      v_dot(controller_.cert(), controller_.bounds().sigma, c.E, s.v, j_inv, s.gamma);
  s.V_dot = vd.value;
  s.branch = vd.branch;
  s.saturated = held.mix.saturated;

  MonitorSample ms;
  ms.t = t;
  ms.eta = s.eta;
  ms.eta_dot = s.eta_dot;
  ms.eta_d_ddot = ref.eta_d_ddot;
  ms.d = s.d;
  ms.E = s.E;
  ms.v = s.v;
  ms.gamma = s.gamma;
  s.assumption_flags = check_assumptions(assumptions_, ms).violated.bits();
  return s;
}

LogSample Simulator::sample_at(const EulerState& state, double t) const {
  return make_sample(state, t, hold_control(state, t));
}

EulerState Simulator::integrate(const EulerState& state, double t, const Held& held) const {
  const double h = scenario_.dt;
  auto accel = [&](double tt, const Vec3& eta, const Vec3& rate) -> Vec3 {
    const EulerState stage(eta, rate);
    const Torque tau = scenario_.continuous_control ? hold_control(stage, tt).applied : held.applied;
    return attitude_accel(plant_, stage, tau, schedule_.at(tt));
  };
  const Vec3& q0 = state.eta();
  const Vec3& r0 = state.eta_dot();

  const Vec3 k1q = r0;
  const Vec3 k1r = accel(t, q0, r0);
  const Vec3 k2q = r0 + 0.5 * h * k1r;
  const Vec3 k2r = accel(t + 0.5 * h, q0 + 0.5 * h * k1q, k2q);
  const Vec3 k3q = r0 + 0.5 * h * k2r;
  const Vec3 k3r = accel(t + 0.5 * h, q0 + 0.5 * h * k2q, k3q);
  const Vec3 k4q = r0 + h * k3r;
  const Vec3 k4r = accel(t + h, q0 + h * k3q, k4q);

  const Vec3 q1 = q0 + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  const Vec3 r1 = r0 + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
  return EulerState(q1, r1);
}

StepResult Simulator::step(const EulerState& state, double t) const {
  const Held held = hold_control(state, t);
  LogSample sample = make_sample(state, t, held);
  return {integrate(state, t, held), std::move(sample)};
}

TrajectoryLog Simulator::run(const std::function<void(const LogSample&)>& sink) const {
  TrajectoryLog log;
  const std::size_t n = scenario_.sample_count();
  EulerState state(scenario_.initial_eta, scenario_.initial_eta_dot);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * scenario_.dt;
    try {
      const Held held = hold_control(state, t);
      sink(make_sample(state, t, held));
      if (k + 1 < n) state = integrate(state, t, held);
    } catch (const Error& err) {
      // The last emitted row (if any) is the diagnostic sample.
      log.aborted = true;
      log.abort_reason = "aborted at t=" + std::to_string(t) + ": " + err.what();
      break;
    }
  }
  return log;
}

TrajectoryLog Simulator::run() const {
  TrajectoryLog log;
  log.samples.reserve(scenario_.sample_count());
  TrajectoryLog status = run([&](const LogSample& s) { log.samples.push_back(s); });
  log.aborted = status.aborted;
  log.abort_reason = std::move(status.abort_reason);
  return log;
}

MonitorSample to_monitor_sample(const LogSample& row, const Reference& reference) {
  MonitorSample ms;
  ms.t = row.t;
  ms.eta = row.eta;
  ms.eta_dot = row.eta_dot;
  ms.eta_d_ddot = reference.at(row.t).eta_d_ddot;
  ms.d = row.d;
  ms.E = row.E;
  ms.v = row.v;
  ms.gamma = row.gamma;
  return ms;
}

}  // namespace lyapguard

#include "lyapguard/monitor.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "lyapguard/errors.hpp"

namespace lyapguard {
namespace {

constexpr std::array<std::string_view, kCauseCount> kCauseNames = {
    "LyapunovPositive", "DisturbanceBound",     "DeltaNBound",  "RefAccelBound",
    "InertiaMismatchBound", "JInvNormBound", "EnvelopeExit",
};

// Records a sub-check margin and folds it into the cause's overall margin.
void record(AssumptionReport& report, Cause cause, const std::string& key, double margin,
            bool strict) {
  report.margins[key] = margin;
  const std::string cause_key(to_string(cause));
  auto it = report.margins.find(cause_key);
  if (it == report.margins.end() || margin < it->second) report.margins[cause_key] = margin;
  const bool violated = strict ? !(margin > 0.0) : !(margin >= 0.0);
  if (violated) report.violated.insert(cause);
}

}  // namespace

std::string_view to_string(Cause cause) {
  return kCauseNames[static_cast<size_t>(cause)];
}

std::optional<Cause> cause_from_string(std::string_view text) {
  for (size_t i = 0; i < kCauseNames.size(); ++i) {
    if (kCauseNames[i] == text) return static_cast<Cause>(i);
  }
  return std::nullopt;
}

std::vector<Cause> CauseSet::list() const {
  std::vector<Cause> out;
  for (int i = 0; i < kCauseCount; ++i) {
    if (contains(static_cast<Cause>(i))) out.push_back(static_cast<Cause>(i));
  }
  return out;
}

std::string_view to_string(VerdictState state) {
  switch (state) {
    case VerdictState::Stable: return "Stable";
    case VerdictState::Warning: return "Warning";
    case VerdictState::Violation: return "Violation";
  }
  return "?";
}

void MonitorConfig::validate() const {
  plant.validate();
  bounds.validate();
  if (debounce_n < 1) throw InvalidArgument("monitor.debounce_n must be >= 1");
  if (!(e_floor >= 0.0)) throw InvalidArgument("monitor.e_floor must be >= 0");
  if (divider < 1) throw InvalidArgument("monitor.divider must be >= 1");
  if (!(envelope.max_roll > 0.0) || !(envelope.max_pitch > 0.0)) {
    throw InvalidArgument("monitor.envelope limits must be > 0");
  }
  if (!estimates.j_hat || !estimates.n_hat) {
    throw InvalidArgument("monitor needs model estimates");
  }
}

AssumptionReport check_assumptions(const MonitorConfig& cfg, const MonitorSample& sample) {
  AssumptionReport report;
  const RobustBounds& b = cfg.bounds;

  const double roll_margin = cfg.envelope.max_roll - std::abs(sample.eta.x());
  const double pitch_margin = cfg.envelope.max_pitch - std::abs(sample.eta.y());
  record(report, Cause::EnvelopeExit, "EnvelopeExit.roll", roll_margin, false);
  record(report, Cause::EnvelopeExit, "EnvelopeExit.pitch", pitch_margin, false);

  const double d_norm = sample.d.norm();
  const double dd_norm = (cfg.estimates.d_hat - sample.d).norm();
  record(report, Cause::DisturbanceBound, "DisturbanceBound.sum",
         b.disturbance_total - (d_norm + b.disturbance), true);
  record(report, Cause::DisturbanceBound, "DisturbanceBound.estimate_error",
         b.disturbance - dd_norm, false);
  record(report, Cause::DisturbanceBound, "DisturbanceBound.magnitude",
         b.disturbance - d_norm, false);

  record(report, Cause::RefAccelBound, "RefAccelBound",
         b.ref_accel - sample.eta_d_ddot.norm(), true);

  if (!in_chart(sample.eta, sample.eta_dot)) {
    report.violated.insert(Cause::EnvelopeExit);
    return report;
  }
  try {
    const EulerState state(sample.eta, sample.eta_dot);
    const Mat3 j_inv = j_inverse(cfg.plant, state.eta());
    const Vec3 delta_n = cfg.estimates.n_hat(state) - coriolis_vector(cfg.plant, state);
    record(report, Cause::DeltaNBound, "DeltaNBound", b.coriolis_error - delta_n.norm(), false);

    const double mismatch =
        induced_norm(Mat3::Identity() - cfg.estimates.j_hat(state.eta()) * j_inv);
    record(report, Cause::InertiaMismatchBound, "InertiaMismatchBound", b.xi - mismatch, false);

    const double j_inv_norm = induced_norm(j_inv);
    record(report, Cause::JInvNormBound, "JInvNormBound.lower", j_inv_norm - b.beta_min, false);
    record(report, Cause::JInvNormBound, "JInvNormBound.upper", b.beta_max - j_inv_norm, false);
  } catch (const Error&) {
    report.violated.insert(Cause::EnvelopeExit);
  }
  return report;
}

LyapunovCheck check_lyapunov(const MonitorConfig& cfg, const MonitorSample& sample) {
  LyapunovCheck out;
  const Mat3 j_inv = j_inverse(cfg.plant, sample.eta);
  const VdotResult vd = v_dot(cfg.cert, cfg.bounds.sigma, sample.E, sample.v, j_inv, sample.gamma);
  out.v_dot = vd.value;
  out.branch = vd.branch;
  const VBoundTemplate tmpl =
      cfg.v_bound.value_or(VBoundTemplate::matched(cfg.bounds, cfg.cert.gains()));
  out.margin = stability_margin(cfg.cert, sample.E, v_bound(tmpl, sample.E), j_inv, sample.gamma);
  out.violated = vd.value >= 0.0 && sample.E.norm() > cfg.e_floor;
  return out;
}

Verdict evaluate_sample(const MonitorConfig& cfg, const MonitorSample& sample) {
  Verdict verdict;
  verdict.t = sample.t;
  AssumptionReport report = check_assumptions(cfg, sample);
  verdict.causes = report.violated;
  verdict.details = std::move(report.margins);
  if (in_chart(sample.eta, sample.eta_dot)) {
    try {
      const LyapunovCheck lc = check_lyapunov(cfg, sample);
      verdict.details["LyapunovPositive"] = -lc.v_dot;
      verdict.details["LyapunovPositive.worst_case"] = -lc.margin;
      if (lc.violated) verdict.causes.insert(Cause::LyapunovPositive);
    } catch (const Error&) {
      verdict.causes.insert(Cause::EnvelopeExit);
    }
  }
  return verdict;
}

FeedResult advance(const MonitorConfig& cfg, const MonitorState& state, const Verdict& verdict) {
  FeedResult out;
  out.next = state;
  MonitorState& s = out.next;
  const bool bad = !verdict.causes.empty();

  auto transition = [&](VerdictState to) {
    Transition tr;
    tr.t = verdict.t;
    tr.from = s.state;
    tr.to = to;
    if (to != VerdictState::Stable) {
      tr.causes = verdict.causes;
      for (Cause c : verdict.causes.list()) {
        const auto it = verdict.details.find(std::string(to_string(c)));
        if (it != verdict.details.end()) tr.margins[it->first] = it->second;
      }
    }
    s.state = to;
    if (to == VerdictState::Warning) s.reached_warning = true;
    if (to == VerdictState::Violation) s.reached_violation = true;
    out.transitions.push_back(std::move(tr));
  };

  if (bad) {
    s.consecutive_clean = 0;
    ++s.consecutive_bad;
  } else {
    s.consecutive_bad = 0;
    ++s.consecutive_clean;
  }

  switch (s.state) {
    case VerdictState::Stable:
      if (bad) {
        transition(VerdictState::Warning);
        if (s.consecutive_bad >= cfg.debounce_n) transition(VerdictState::Violation);
      }
      break;
    case VerdictState::Warning:
      if (bad && s.consecutive_bad >= cfg.debounce_n) {
        transition(VerdictState::Violation);
      } else if (!bad && s.consecutive_clean >= cfg.debounce_n) {
        transition(VerdictState::Stable);
      }
      break;
    case VerdictState::Violation:
      // Latched: recovery is a decision for the autopilot, not the monitor.
      break;
  }

  Verdict v = verdict;
  v.state = s.state;
  out.verdict = std::move(v);
  return out;
}

FeedResult feed(const MonitorConfig& cfg, const MonitorState& state, const MonitorSample& sample) {
  if (state.last_t && sample.t < *state.last_t) {
    throw InvalidArgument("monitor samples out of order: t=" + std::to_string(sample.t) +
                          " after t=" + std::to_string(*state.last_t));
  }
  const bool take = state.samples_seen % cfg.divider == 0;
  FeedResult out;
  if (take) {
    out = advance(cfg, state, evaluate_sample(cfg, sample));
  } else {
    out.next = state;
  }
  out.next.samples_seen = state.samples_seen + 1;
  out.next.last_t = sample.t;
  return out;
}

int exit_code(const MonitorState& state) {
  if (state.reached_violation) return 20;
  if (state.reached_warning) return 10;
  return 0;
}

Monitor::Monitor(MonitorConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<Transition> Monitor::feed(const MonitorSample& sample) {
  FeedResult r = lyapguard::feed(cfg_, state_, sample);
  state_ = r.next;
  return std::move(r.transitions);
}

}  // namespace lyapguard

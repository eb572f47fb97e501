#include "lyapguard/controller.hpp"

#include <cmath>
#include <utility>

#include "lyapguard/errors.hpp"

namespace lyapguard {

void RobustBounds::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(disturbance) || disturbance < 0.0) {
    throw InvalidArgument("bounds.D must be >= 0");
  }
  if (!finite(disturbance_total) || !(disturbance_total > disturbance)) {
    throw InvalidArgument(
        "bounds.D_bar must exceed bounds.D: ||d|| + D < D_bar is unsatisfiable otherwise");
  }
  if (!finite(coriolis_error) || coriolis_error < 0.0) {
    throw InvalidArgument("bounds.S must be >= 0");
  }
  if (!finite(ref_accel) || !(ref_accel > 0.0)) throw InvalidArgument("bounds.H must be > 0");
  if (!finite(xi) || xi < 0.0 || xi > 1.0) {
    throw InvalidArgument("bounds.xi must satisfy 0 <= xi <= 1");
  }
  if (!finite(beta_min) || !finite(beta_max) || !(beta_min > 0.0) || !(beta_min <= beta_max)) {
    throw InvalidArgument("bounds must satisfy 0 < beta_min <= beta_max");
  }
  if (!finite(sigma) || !(sigma > 0.0)) throw InvalidArgument("bounds.sigma must be > 0");
}

ModelEstimates ModelEstimates::scaled(const PlantParams& params, double mismatch,
                                      const Vec3& d_hat) {
  if (!std::isfinite(mismatch) || mismatch <= -1.0) {
    throw InvalidArgument("mismatch must be finite and > -1");
  }
  ModelEstimates est;
  const double factor = 1.0 + mismatch;
  est.j_hat = [params, factor](const Vec3& eta) { return Mat3(factor * j_mat(params, eta)); };
  est.n_hat = [params, factor](const EulerState& state) {
    return Vec3(factor * coriolis_vector(params, state));
  };
  est.d_hat = d_hat;
  return est;
}

AxisSample AxisReference::at(double t) const {
  switch (kind) {
    case Kind::Constant:
      return {offset, 0.0, 0.0};
    case Kind::Sinusoid: {
      const double arg = frequency * t + phase;
      return {offset + amplitude * std::sin(arg), amplitude * frequency * std::cos(arg),
              -amplitude * frequency * frequency * std::sin(arg)};
    }
    case Kind::Step:
      return {t >= step_time ? offset + amplitude : offset, 0.0, 0.0};
  }
  return {};
}

ReferenceSample Reference::at(double t) const {
  ReferenceSample out;
  for (int i = 0; i < 3; ++i) {
    const AxisSample s = axes_[static_cast<size_t>(i)].at(t);
    out.eta_d(i) = s.position;
    out.eta_d_dot(i) = s.rate;
    out.eta_d_ddot(i) = s.accel;
  }
  return out;
}

double Reference::sup_accel(double duration, double dt) const {
  double sup = 0.0;
  const auto steps = static_cast<long>(std::floor(duration / dt + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    sup = std::max(sup, at(static_cast<double>(k) * dt).eta_d_ddot.norm());
  }
  return sup;
}

VBoundTemplate VBoundTemplate::from(const RobustBounds& bounds, const Vec3& rate_coeff,
                                    const Vec3& angle_coeff) {
  VBoundTemplate t;
  t.xi = bounds.xi;
  t.ref_accel = bounds.ref_accel;
  t.rate_coeff = rate_coeff;
  t.angle_coeff = angle_coeff;
  t.beta_max = bounds.beta_max;
  t.coriolis_error = bounds.coriolis_error;
  t.disturbance = bounds.disturbance;
  return t;
}

VBoundTemplate VBoundTemplate::matched(const RobustBounds& bounds, const Gains& gains) {
  return from(bounds, gains.k_r, gains.k_eta);
}

void VBoundTemplate::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  bool good = ok(xi) && ok(ref_accel) && ok(beta_max) && ok(coriolis_error) && ok(disturbance);
  for (int i = 0; i < 3; ++i) good = good && ok(rate_coeff(i)) && ok(angle_coeff(i));
  if (!good) throw InvalidArgument("v_bound template coefficients must be finite and >= 0");
}

Vec6 error_state(const EulerState& state, const ReferenceSample& ref) {
  Vec6 E;
  E.head<3>() = ref.eta_d - state.eta();
  E.tail<3>() = ref.eta_d_dot - state.eta_dot();
  return E;
}

Vec6 error_state(const EulerState& state, const Reference& ref, double t) {
  return error_state(state, ref.at(t));
}

Vec3 control_u(const Vec3& ref_ddot, const Gains& gains, const Vec6& E) {
  return ref_ddot + gains.k_r.cwiseProduct(E.tail<3>()) + gains.k_eta.cwiseProduct(E.head<3>());
}

Vec3 gamma(const RobustBounds& bounds, const LyapunovCert& cert, const Vec6& E, double delta) {
  const Vec3 s = cert.switching_vector(E);
  const double norm = s.norm();
  if (norm >= bounds.sigma) return (delta / norm) * s;
  return (delta / bounds.sigma) * s;
}

Vec3 v_bound(const VBoundTemplate& tmpl, const Vec6& E) {
  Vec3 vb;
  const double floor_term = tmpl.beta_max * (tmpl.coriolis_error + tmpl.disturbance);
  for (int i = 0; i < 3; ++i) {
    vb(i) = tmpl.xi * (tmpl.ref_accel + tmpl.rate_coeff(i) * std::abs(E(i + 3)) +
                       tmpl.angle_coeff(i) * std::abs(E(i))) +
            floor_term;
  }
  return vb;
}

double delta_gain(const RobustBounds& bounds, const Vec3& vb) {
  return vb.norm() / bounds.beta_min;
}

Torque control_tau(const ModelEstimates& est, const Vec3& u, const Vec3& gam,
                   const EulerState& state) {
  Torque tau;
  tau.value = est.j_hat(state.eta()) * u + est.n_hat(state) + est.d_hat + gam;
  return tau;
}

Vec3 uncertainty_v(const PlantParams& params, const ModelEstimates& est,
                   const EulerState& state, const Vec3& u, const DisturbanceTorque& d) {
  const Mat3 j_inv = j_inverse(params, state.eta());
  const Vec3 delta_n = est.n_hat(state) - coriolis_vector(params, state);
  const Vec3 delta_d = est.d_hat - d.value;
  return (Mat3::Identity() - est.j_hat(state.eta()) * j_inv) * u - j_inv * (delta_n + delta_d);
}

RobustController::RobustController(Gains gains, RobustBounds bounds, VBoundTemplate tmpl,
                                   ModelEstimates estimates, const Mat6& P)
    : gains_(std::move(gains)),
      bounds_(bounds),
      tmpl_(tmpl),
      estimates_(std::move(estimates)),
      cert_(gains_, P) {
  bounds_.validate();
  tmpl_.validate();
  if (!estimates_.j_hat || !estimates_.n_hat) {
    throw InvalidArgument("model estimates must provide j_hat and n_hat");
  }
}

ControlOutput RobustController::compute(const EulerState& state,
                                        const ReferenceSample& ref) const {
  ControlOutput out;
  out.E = error_state(state, ref);
  out.u = control_u(ref.eta_d_ddot, gains_, out.E);
  out.v_bound = v_bound(tmpl_, out.E);
  out.delta = delta_gain(bounds_, out.v_bound);
  out.gamma = gamma(bounds_, cert_, out.E, out.delta);
  out.tau = control_tau(estimates_, out.u, out.gamma, state);
  return out;
}

}  // namespace lyapguard

// Robust dynamic-inversion attitude controller.
//
//   u     = eta_d'' + K_r e' + K_eta e
//   tau   = Jhat(eta) u + Nhat(eta, eta') + dhat + gamma
//   v     = [I - Jhat J^{-1}] u - J^{-1} [dN + dd],  dN = Nhat - N, dd = dhat - d
//   gamma = delta s / max(||s||, sigma),             s = B^T Q E
//   delta = ||v_bound|| / beta_min
#pragma once

#include <array>
#include <functional>

#include "lyapguard/dynamics.hpp"
#include "lyapguard/gains.hpp"
#include "lyapguard/lyapunov.hpp"

namespace lyapguard {

/// Constants of the disturbance, uncertainty and reference assumptions.
struct RobustBounds {
  double disturbance = 0.001;        // D:     ||dd|| <= D
  double disturbance_total = 0.01;   // D_bar: ||d|| + D < D_bar
  double coriolis_error = 0.001;     // S:     ||dN|| <= S
  double ref_accel = 1.2;            // H:     sup ||eta_d''|| < H
  double xi = 0.5;                   //        ||I - Jhat J^{-1}|| <= xi <= 1
  double beta_min = 50.0;            //        beta_min <= ||J^{-1}|| <= beta_max
  double beta_max = 400.0;
  double sigma = 0.05;               // boundary-layer width

  /// Throws InvalidArgument naming the violated relation.
  void validate() const;

  bool operator==(const RobustBounds&) const = default;
};

/// Jhat, Nhat, dhat used by the inversion.
struct ModelEstimates {
  std::function<Mat3(const Vec3& eta)> j_hat;
  std::function<Vec3(const EulerState& state)> n_hat;
  Vec3 d_hat = Vec3::Zero();

  /// Jhat = (1 + mismatch) J, Nhat = (1 + mismatch) C eta', constant dhat.
  static ModelEstimates scaled(const PlantParams& params, double mismatch,
                               const Vec3& d_hat = Vec3::Zero());
};

struct ReferenceSample {
  Vec3 eta_d = Vec3::Zero();
  Vec3 eta_d_dot = Vec3::Zero();
  Vec3 eta_d_ddot = Vec3::Zero();
};

struct AxisSample {
  double position = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// One reference channel. Sinusoid: offset + amplitude sin(frequency t + phase).
/// Step: offset before step_time, offset + amplitude after (derivatives zero).
struct AxisReference {
  enum class Kind { Constant, Sinusoid, Step };
  Kind kind = Kind::Constant;
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;  // [rad/s]
  double phase = 0.0;
  double step_time = 0.0;

  AxisSample at(double t) const;

  bool operator==(const AxisReference&) const = default;
};

class Reference {
 public:
  Reference() = default;
  explicit Reference(std::array<AxisReference, 3> axes) : axes_(axes) {}

  ReferenceSample at(double t) const;

  /// max ||eta_d''(t)|| over t = 0, dt, ..., duration.
  double sup_accel(double duration, double dt) const;

  const std::array<AxisReference, 3>& axes() const noexcept { return axes_; }

  bool operator==(const Reference&) const = default;

 private:
  std::array<AxisReference, 3> axes_{};
};

/// Per-axis affine bound on the uncertainty aggregate:
///   |v_i| <= xi (H + rate_coeff_i |E_{i+3}| + angle_coeff_i |E_i|) + beta_max (S + D)
struct VBoundTemplate {
  double xi = 0.5;
  double ref_accel = 1.2;
  Vec3 rate_coeff = Vec3::Ones();
  Vec3 angle_coeff = Vec3::Ones();
  double beta_max = 400.0;
  double coriolis_error = 0.001;
  double disturbance = 0.001;

  static VBoundTemplate from(const RobustBounds& bounds, const Vec3& rate_coeff,
                             const Vec3& angle_coeff);

  /// Coefficients equal to the gains: rate_coeff = K_r, angle_coeff = K_eta.
  static VBoundTemplate matched(const RobustBounds& bounds, const Gains& gains);

  /// Throws InvalidArgument on negative or non-finite coefficients.
  void validate() const;

  bool operator==(const VBoundTemplate&) const = default;
};

/// E = (e; e') with e = eta_d - eta.
Vec6 error_state(const EulerState& state, const ReferenceSample& ref);
Vec6 error_state(const EulerState& state, const Reference& ref, double t);

Vec3 control_u(const Vec3& ref_ddot, const Gains& gains, const Vec6& E);

Vec3 gamma(const RobustBounds& bounds, const LyapunovCert& cert, const Vec6& E, double delta);

Vec3 v_bound(const VBoundTemplate& tmpl, const Vec6& E);

double delta_gain(const RobustBounds& bounds, const Vec3& vb);

Torque control_tau(const ModelEstimates& est, const Vec3& u, const Vec3& gam,
                   const EulerState& state);

Vec3 uncertainty_v(const PlantParams& params, const ModelEstimates& est,
                   const EulerState& state, const Vec3& u, const DisturbanceTorque& d);

/// Everything one control evaluation produces.
struct ControlOutput {
  Vec6 E = Vec6::Zero();
  Vec3 u = Vec3::Zero();
  Vec3 v_bound = Vec3::Zero();
  double delta = 0.0;
  Vec3 gamma = Vec3::Zero();
  Torque tau;
};

/// Stateless robust controller bundling gains, bounds, certificate and estimates.
class RobustController {
 public:
  RobustController(Gains gains, RobustBounds bounds, VBoundTemplate tmpl,
                   ModelEstimates estimates, const Mat6& P = Mat6::Identity());

  ControlOutput compute(const EulerState& state, const ReferenceSample& ref) const;

  const Gains& gains() const noexcept { return gains_; }
  const RobustBounds& bounds() const noexcept { return bounds_; }
  const VBoundTemplate& v_bound_template() const noexcept { return tmpl_; }
  const ModelEstimates& estimates() const noexcept { return estimates_; }
  const LyapunovCert& cert() const noexcept { return cert_; }

 private:
  Gains gains_;
  RobustBounds bounds_;
  VBoundTemplate tmpl_;
  ModelEstimates estimates_;
  LyapunovCert cert_;
};

}  // namespace lyapguard

// Euler-angle attitude dynamics of a quadrotor:
//
//   J(eta) eta'' + C(eta, eta') eta' + d = tau
//
// with J(eta) = W(eta)^T diag(Ix, Iy, Iz) W(eta), W the ZYX Euler-rate to
// body-rate map and C built from the Christoffel symbols of J.
#pragma once

#include <array>
#include <numbers>

#include "lyapguard/linalg.hpp"

namespace lyapguard {

/// Distance kept from the pitch/roll singularity at +-pi/2.
inline constexpr double kGimbalMargin = 1e-6;
inline constexpr double kGimbalLimit = std::numbers::pi / 2.0 - kGimbalMargin;

/// Largest accepted condition number when inverting J.
inline constexpr double kMaxConditionNumber = 1e8;

/// Attitude (phi, theta, psi) and Euler-angle rates. Always inside the chart.
class EulerState {
 public:
  /// Throws DomainError when |phi| or |theta| >= kGimbalLimit or any
  /// component is not finite.
  EulerState(const Vec3& eta, const Vec3& eta_dot);

  const Vec3& eta() const noexcept { return eta_; }
  const Vec3& eta_dot() const noexcept { return eta_dot_; }

  double roll() const noexcept { return eta_.x(); }
  double pitch() const noexcept { return eta_.y(); }
  double yaw() const noexcept { return eta_.z(); }

  bool operator==(const EulerState&) const = default;

 private:
  Vec3 eta_;
  Vec3 eta_dot_;
};

/// Returns true when (eta, eta_dot) would be accepted by EulerState.
bool in_chart(const Vec3& eta, const Vec3& eta_dot) noexcept;

struct PlantParams {
  double arm_length = 0.225;      // l [m]
  double thrust_coeff = 2.98e-6;  // k [N s^2]
  double drag_coeff = 1.14e-7;    // b [N m s^2]
  Vec3 body_inertia{4.856e-3, 4.856e-3, 8.801e-3};  // Ix, Iy, Iz [kg m^2]
  double omega_max = 1200.0;      // [rad/s]

  /// Throws InvalidArgument unless every constant is finite and > 0.
  void validate() const;

  bool operator==(const PlantParams&) const = default;
};

struct RotorSpeeds {
  Vec4 omega = Vec4::Zero();  // [rad/s]
};

struct Torque {
  Vec3 value = Vec3::Zero();  // (tau_phi, tau_theta, tau_psi) [N m]
};

struct DisturbanceTorque {
  Vec3 value = Vec3::Zero();  // [N m]
};

/// W(eta): maps Euler-angle rates to body rates. det W = cos(theta).
Mat3 euler_rate_transform(const Vec3& eta);

/// Inverse of W(eta) in closed form.
Mat3 euler_rate_transform_inverse(const Vec3& eta);

/// J(eta) = W^T diag(I) W. Symmetric positive definite inside the chart.
Mat3 j_mat(const PlantParams& params, const Vec3& eta);

/// Partial derivatives dJ/dphi, dJ/dtheta, dJ/dpsi (the last is zero).
std::array<Mat3, 3> j_mat_partials(const PlantParams& params, const Vec3& eta);

/// dJ/dt along the state's rates.
Mat3 j_mat_dot(const PlantParams& params, const EulerState& state);

/// Coriolis matrix from the Christoffel symbols of J: J' - 2C is skew.
Mat3 c_mat(const PlantParams& params, const EulerState& state);

/// N(eta, eta') = C(eta, eta') eta'.
Vec3 coriolis_vector(const PlantParams& params, const EulerState& state);

/// Closed-form 3x3 inverse; throws SingularityError when cond(m) exceeds
/// kMaxConditionNumber.
Mat3 checked_inverse(const Mat3& m);

/// J^{-1}(eta) through checked_inverse.
Mat3 j_inverse(const PlantParams& params, const Vec3& eta);

/// Rotor mixing:
///   tau_phi   = l k (w2^2 - w4^2)
///   tau_theta = l k (-w1^2 + w3^2)
///   tau_psi   = b (-w1^2 + w2^2 - w3^2 + w4^2)
/// Throws InvalidArgument if any |w_i| >= omega_max.
Torque torque_from_rotors(const PlantParams& params, const RotorSpeeds& rotors);

enum class MixPolicy {
  Strict,  // negative squared speed -> InfeasibleMixError
  Clamp,   // clamp to [0, omega_max) and flag saturation
};

struct MixResult {
  RotorSpeeds rotors;
  bool saturated = false;
};

/// Inverse mixing for a requested torque and total thrust k * sum(w_i^2).
/// Speeds above omega_max are always clamped (saturated = true).
MixResult rotors_from_torque(const PlantParams& params, const Torque& tau,
                             double thrust, MixPolicy policy = MixPolicy::Strict);

/// eta'' = J^{-1} (tau - C eta' - d).
Vec3 attitude_accel(const PlantParams& params, const EulerState& state,
                    const Torque& tau, const DisturbanceTorque& d);

}  // namespace lyapguard

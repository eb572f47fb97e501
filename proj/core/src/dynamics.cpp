#include "lyapguard/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lyapguard/errors.hpp"

namespace lyapguard {
namespace {

void require_chart(const Vec3& eta) {
  if (!(std::abs(eta.x()) < kGimbalLimit) || !(std::abs(eta.y()) < kGimbalLimit)) {
    throw DomainError("attitude outside Euler chart: phi=" + std::to_string(eta.x()) +
                      " theta=" + std::to_string(eta.y()));
  }
}

Mat3 inertia_matrix(const PlantParams& params) {
  return params.body_inertia.asDiagonal();
}

}  // namespace

EulerState::EulerState(const Vec3& eta, const Vec3& eta_dot) : eta_(eta), eta_dot_(eta_dot) {
  if (!eta.allFinite() || !eta_dot.allFinite()) {
    throw DomainError("non-finite Euler state");
  }
  require_chart(eta);
}

bool in_chart(const Vec3& eta, const Vec3& eta_dot) noexcept {
  return eta.allFinite() && eta_dot.allFinite() && std::abs(eta.x()) < kGimbalLimit &&
         std::abs(eta.y()) < kGimbalLimit;
}

void PlantParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(arm_length)) throw InvalidArgument("plant.arm_length must be > 0");
  if (!positive(thrust_coeff)) throw InvalidArgument("plant.thrust_coeff must be > 0");
  if (!positive(drag_coeff)) throw InvalidArgument("plant.drag_coeff must be > 0");
  for (int i = 0; i < 3; ++i) {
    if (!positive(body_inertia(i))) throw InvalidArgument("plant.body_inertia entries must be > 0");
  }
  if (!positive(omega_max)) throw InvalidArgument("plant.omega_max must be > 0");
}

Mat3 euler_rate_transform(const Vec3& eta) {
  require_chart(eta);
  const double sp = std::sin(eta.x()), cp = std::cos(eta.x());
  const double st = std::sin(eta.y()), ct = std::cos(eta.y());
  Mat3 w;
  w << 1.0, 0.0, -st,
       0.0, cp, ct * sp,
       0.0, -sp, ct * cp;
  return w;
}

Mat3 euler_rate_transform_inverse(const Vec3& eta) {
  require_chart(eta);
  const double sp = std::sin(eta.x()), cp = std::cos(eta.x());
  const double st = std::sin(eta.y()), ct = std::cos(eta.y());
  Mat3 w_inv;
  w_inv << 1.0, sp * st / ct, cp * st / ct,
           0.0, cp, -sp,
           0.0, sp / ct, cp / ct;
  return w_inv;
}

Mat3 j_mat(const PlantParams& params, const Vec3& eta) {
  const Mat3 w = euler_rate_transform(eta);
  const Mat3 j = w.transpose() * inertia_matrix(params) * w;
  // The triple product is symmetric only up to rounding; callers rely on exact symmetry.
  return 0.5 * (j + j.transpose());
}

std::array<Mat3, 3> j_mat_partials(const PlantParams& params, const Vec3& eta) {
  const Mat3 w = euler_rate_transform(eta);
  const Mat3 m = inertia_matrix(params);
  const double sp = std::sin(eta.x()), cp = std::cos(eta.x());
  const double st = std::sin(eta.y()), ct = std::cos(eta.y());

  Mat3 dw_dphi;
  dw_dphi << 0.0, 0.0, 0.0,
             0.0, -sp, ct * cp,
             0.0, -cp, -ct * sp;
  Mat3 dw_dtheta;
  dw_dtheta << 0.0, 0.0, -ct,
               0.0, 0.0, -st * sp,
               0.0, 0.0, -st * cp;

  auto partial = [&](const Mat3& dw) -> Mat3 {
    const Mat3 half = dw.transpose() * m * w;
    return half + half.transpose();
  };
  return {partial(dw_dphi), partial(dw_dtheta), Mat3::Zero()};
}

Mat3 j_mat_dot(const PlantParams& params, const EulerState& state) {
  const auto dj = j_mat_partials(params, state.eta());
  const Vec3& rate = state.eta_dot();
  return dj[0] * rate(0) + dj[1] * rate(1) + dj[2] * rate(2);
}

Mat3 c_mat(const PlantParams& params, const EulerState& state) {
  const auto dj = j_mat_partials(params, state.eta());
  const Vec3& rate = state.eta_dot();
  Mat3 c = Mat3::Zero();
  // Christoffel symbols of the first kind contracted with the rates.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        sum += 0.5 * (dj[k](i, j) + dj[j](i, k) - dj[i](j, k)) * rate(k);
      }
      c(i, j) = sum;
    }
  }
  return c;
}

Vec3 coriolis_vector(const PlantParams& params, const EulerState& state) {
  return c_mat(params, state) * state.eta_dot();
}

Mat3 checked_inverse(const Mat3& m) {
  if (!m.allFinite()) throw SingularityError("matrix has non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(m);
  const Vec3 sv = svd.singularValues();
  if (!(sv(2) > 0.0) || sv(0) / sv(2) > kMaxConditionNumber) {
    throw SingularityError("matrix condition number exceeds cap");
  }
  return m.inverse();
}

Mat3 j_inverse(const PlantParams& params, const Vec3& eta) {
  return checked_inverse(j_mat(params, eta));
}

Torque torque_from_rotors(const PlantParams& params, const RotorSpeeds& rotors) {
  for (int i = 0; i < 4; ++i) {
    if (!(std::abs(rotors.omega(i)) < params.omega_max)) {
      throw InvalidArgument("rotor speed " + std::to_string(i + 1) + " not below omega_max");
    }
  }
  const Vec4 sq = rotors.omega.cwiseProduct(rotors.omega);
  const double lk = params.arm_length * params.thrust_coeff;
  Torque tau;
  tau.value << lk * (sq(1) - sq(3)),
               lk * (-sq(0) + sq(2)),
               params.drag_coeff * (-sq(0) + sq(1) - sq(2) + sq(3));
  return tau;
}

MixResult rotors_from_torque(const PlantParams& params, const Torque& tau, double thrust,
                             MixPolicy policy) {
  if (!(thrust >= 0.0) || !tau.value.allFinite()) {
    throw InvalidArgument("thrust must be >= 0 and torque finite");
  }
  const double lk = params.arm_length * params.thrust_coeff;
  const double roll = tau.value(0) / lk;
  const double pitch = tau.value(1) / lk;
  const double yaw = tau.value(2) / params.drag_coeff;
  const double total = thrust / params.thrust_coeff;

  const double pair24 = 0.5 * (total + yaw);
  const double pair13 = 0.5 * (total - yaw);
  Vec4 sq{0.5 * (pair13 - pitch), 0.5 * (pair24 + roll), 0.5 * (pair13 + pitch),
          0.5 * (pair24 - roll)};

  MixResult result;
  const double limit = std::nextafter(params.omega_max, 0.0);
  for (int i = 0; i < 4; ++i) {
    if (sq(i) < 0.0) {
      if (policy == MixPolicy::Strict) {
        throw InfeasibleMixError("rotor " + std::to_string(i + 1) +
                                 " needs a negative squared speed");
      }
      sq(i) = 0.0;
      result.saturated = true;
    }
    double w = std::sqrt(sq(i));
    if (w >= params.omega_max) {
      w = limit;
      result.saturated = true;
    }
    result.rotors.omega(i) = w;
  }
  return result;
}

Vec3 attitude_accel(const PlantParams& params, const EulerState& state, const Torque& tau,
                    const DisturbanceTorque& d) {
  const Mat3 j_inv = j_inverse(params, state.eta());
  return j_inv * (tau.value - coriolis_vector(params, state) - d.value);
}

}  // namespace lyapguard

#include "lyapguard/lyapunov.hpp"

#include <cmath>

#include "lyapguard/errors.hpp"

namespace lyapguard {

void Gains::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(std::isfinite(k_eta(i)) && k_eta(i) > 0.0)) {
      throw InvalidArgument("gains.k_eta entries must be > 0");
    }
    if (!(std::isfinite(k_r(i)) && k_r(i) > 0.0)) {
      throw InvalidArgument("gains.k_r entries must be > 0");
    }
  }
}

std::string_view to_string(Branch branch) {
  return branch == Branch::Outside ? "outside" : "boundary_layer";
}

Branch branch_from_string(std::string_view text) {
  if (text == "outside") return Branch::Outside;
  if (text == "boundary_layer") return Branch::BoundaryLayer;
  throw InvalidArgument("unknown branch '" + std::string(text) + "'");
}

Mat6 build_A(const Gains& gains) {
  Mat6 a = Mat6::Zero();
  a.topRightCorner<3, 3>() = Mat3::Identity();
  a.bottomLeftCorner<3, 3>() = -gains.k_eta_matrix();
  a.bottomRightCorner<3, 3>() = -gains.k_r_matrix();
  return a;
}

Mat63 build_B() {
  Mat63 b = Mat63::Zero();
  b.bottomRows<3>() = Mat3::Identity();
  return b;
}

double spectral_abscissa(const Mat6& A) {
  Eigen::EigenSolver<Mat6> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

Mat6 solve_lyapunov(const Mat6& A, const Mat6& P) {
  if (!A.allFinite() || !P.allFinite()) throw InvalidArgument("non-finite Lyapunov input");
  if (!(spectral_abscissa(A) < 0.0)) {
    throw NonHurwitzError("A has an eigenvalue with non-negative real part");
  }
  if ((P - P.transpose()).norm() > 1e-12 * (1.0 + P.norm()) ||
      !(min_symmetric_eigenvalue(P) > 0.0)) {
    throw InvalidArgument("P must be symmetric positive definite");
  }

  // Column-major vec: vec(A^T Q) = (I (x) A^T) vec(Q), vec(Q A) = (A^T (x) I) vec(Q).
  using Mat36 = Eigen::Matrix<double, 36, 36>;
  Mat36 kron = Mat36::Zero();
  const Mat6 at = A.transpose();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) kron.block<6, 6>(6 * i, 6 * j) += at;
      kron.block<6, 6>(6 * i, 6 * j) += at(i, j) * Mat6::Identity();
    }
  }
  Eigen::Matrix<double, 36, 1> rhs;
  for (int c = 0; c < 6; ++c) rhs.segment<6>(6 * c) = -P.col(c);

  const Eigen::Matrix<double, 36, 1> sol = kron.fullPivLu().solve(rhs);
  Mat6 q;
  for (int c = 0; c < 6; ++c) q.col(c) = sol.segment<6>(6 * c);
  return 0.5 * (q + q.transpose());
}

LyapunovCert::LyapunovCert(const Gains& gains, const Mat6& P)
    : gains_(gains), a_(build_A(gains)), b_(build_B()), p_(P) {
  gains.validate();
  q_ = solve_lyapunov(a_, p_);
  qb_t_ = b_.transpose() * q_;
}

double LyapunovCert::residual() const {
  return (a_.transpose() * q_ + q_ * a_ + p_).norm();
}

CertSummary LyapunovCert::summary() const {
  CertSummary s;
  s.q_eigenvalues = Eigen::SelfAdjointEigenSolver<Mat6>(q_, Eigen::EigenvaluesOnly).eigenvalues();
  s.p_eigenvalues = Eigen::SelfAdjointEigenSolver<Mat6>(p_, Eigen::EigenvaluesOnly).eigenvalues();
  s.residual = residual();
  s.a_spectral_abscissa = spectral_abscissa(a_);
  return s;
}

double v_of(const LyapunovCert& cert, const Vec6& E) {
  if (E.isZero(0.0)) return 0.0;
  return E.dot(cert.Q() * E);
}

Vec6 error_dynamics_rhs(const LyapunovCert& cert, const Vec6& E, const Vec3& v,
                        const Vec3& j_inv_gamma) {
  return cert.A() * E + cert.B() * (v - j_inv_gamma);
}

VdotResult v_dot(const LyapunovCert& cert, double sigma, const Vec6& E, const Vec3& v,
                 const Mat3& j_inv, const Vec3& gamma) {
  const Vec3 s = cert.switching_vector(E);
  VdotResult out;
  out.value = -E.dot(cert.P() * E) + 2.0 * s.dot(v - j_inv * gamma);
  out.branch = s.norm() >= sigma ? Branch::Outside : Branch::BoundaryLayer;
  return out;
}

double stability_margin(const LyapunovCert& cert, const Vec6& E, const Vec3& v_bound,
                        const Mat3& j_inv, const Vec3& gamma) {
  const Vec3 s = cert.switching_vector(E);
  const double worst_v = s.cwiseAbs().dot(v_bound.cwiseAbs());
  return -E.dot(cert.P() * E) + 2.0 * worst_v - 2.0 * s.dot(j_inv * gamma);
}

}  // namespace lyapguard

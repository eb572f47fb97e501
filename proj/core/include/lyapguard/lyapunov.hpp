// Closed-loop error system E' = A E + B (v - J^{-1} gamma) and the quadratic
// certificate V(E) = E^T Q E with A^T Q + Q A = -P.
#pragma once

#include <string>

#include "lyapguard/gains.hpp"
#include "lyapguard/linalg.hpp"

namespace lyapguard {

/// Which side of the boundary layer ||B^T Q E|| vs sigma a sample lies on.
enum class Branch {
  BoundaryLayer,  // ||B^T Q E|| < sigma
  Outside,        // ||B^T Q E|| >= sigma
};

std::string_view to_string(Branch branch);
Branch branch_from_string(std::string_view text);

/// A = [0 I; -K_eta -K_r].
Mat6 build_A(const Gains& gains);

/// B = [0; I].
Mat63 build_B();

/// Solves A^T Q + Q A = -P through the Kronecker-vectorized linear system.
/// Throws NonHurwitzError if any eigenvalue of A has a non-negative real part
/// and InvalidArgument if P is not symmetric positive definite.
Mat6 solve_lyapunov(const Mat6& A, const Mat6& P);

/// Largest real part among the eigenvalues of A.
double spectral_abscissa(const Mat6& A);

struct CertSummary {
  Vec6 q_eigenvalues;
  Vec6 p_eigenvalues;
  double residual = 0.0;  // ||A^T Q + Q A + P||_F
  double a_spectral_abscissa = 0.0;
};

class LyapunovCert {
 public:
  /// Builds A, B from the gains and solves for Q with the given P (default I).
  explicit LyapunovCert(const Gains& gains, const Mat6& P = Mat6::Identity());

  const Mat6& A() const noexcept { return a_; }
  const Mat63& B() const noexcept { return b_; }
  const Mat6& Q() const noexcept { return q_; }
  const Mat6& P() const noexcept { return p_; }
  const Gains& gains() const noexcept { return gains_; }

  /// s = B^T Q E, the switching vector of the robust term.
  Vec3 switching_vector(const Vec6& E) const { return qb_t_ * E; }

  double residual() const;
  CertSummary summary() const;

 private:
  Gains gains_;
  Mat6 a_;
  Mat63 b_;
  Mat6 q_;
  Mat6 p_;
  Eigen::Matrix<double, 3, 6> qb_t_;
};

/// V(E) = E^T Q E (exactly 0 at E = 0).
double v_of(const LyapunovCert& cert, const Vec6& E);

/// A E + B (v - J^{-1} gamma).
Vec6 error_dynamics_rhs(const LyapunovCert& cert, const Vec6& E, const Vec3& v,
                        const Vec3& j_inv_gamma);

struct VdotResult {
  double value = 0.0;
  Branch branch = Branch::BoundaryLayer;
};

/// V'(E) = -E^T P E + 2 (E^T Q B) (v - J^{-1} gamma); branch from ||B^T Q E|| vs sigma.
VdotResult v_dot(const LyapunovCert& cert, double sigma, const Vec6& E, const Vec3& v,
                 const Mat3& j_inv, const Vec3& gamma);

/// V' with v replaced by the worst admissible value |v_i| <= v_bound_i, each
/// component signed against s = B^T Q E. A negative result certifies V' < 0
/// for every admissible v at this E.
double stability_margin(const LyapunovCert& cert, const Vec6& E, const Vec3& v_bound,
                        const Mat3& j_inv, const Vec3& gamma);

}  // namespace lyapguard

#pragma once

#include "lyapguard/linalg.hpp"

namespace lyapguard {

/// Diagonal PD-like gains of u = eta_d'' + K_r e' + K_eta e.
struct Gains {
  Vec3 k_eta{1.0, 1.0, 1.0};  // [1/s^2]
  Vec3 k_r{1.0, 1.0, 1.0};    // [1/s]

  Mat3 k_eta_matrix() const { return k_eta.asDiagonal(); }
  Mat3 k_r_matrix() const { return k_r.asDiagonal(); }

  /// Throws InvalidArgument unless all diagonal entries are finite and > 0.
  void validate() const;

  bool operator==(const Gains&) const = default;
};

}  // namespace lyapguard

#pragma once

#include <stdexcept>
#include <string>

namespace lyapguard {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (bad parameters, bad config).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Attitude outside the Euler-angle chart (|phi| or |theta| too close to pi/2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix inversion rejected by the condition-number cap.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Requested torque/thrust cannot be produced with non-negative squared speeds.
class InfeasibleMixError : public Error {
 public:
  using Error::Error;
};

/// Lyapunov equation requested for a matrix that is not Hurwitz.
class NonHurwitzError : public Error {
 public:
  using Error::Error;
};

}  // namespace lyapguard

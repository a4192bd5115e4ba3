#pragma once

#include <stdexcept>
#include <string>

namespace isp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad geometry, negative order,
/// non-finite input, insufficient sampling).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The spectrum horizon is too short to decide where the stopband starts.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// A numerical quantity left the representable range or an identity that
/// must hold analytically was violated beyond round-off.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (root finder, quadrature) did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace isp

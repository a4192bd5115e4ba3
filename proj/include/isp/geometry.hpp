#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "isp/errors.hpp"

namespace isp {

/// Wavenumber k, source-disk radius R0 and measurement-circle radius R >= R0.
class ProblemGeometry {
 public:
  ProblemGeometry(double k, double r0, double r) : k_(k), r0_(r0), r_(r) {
    if (!std::isfinite(k) || !std::isfinite(r0) || !std::isfinite(r))
      throw DomainError("geometry: non-finite parameter");
    if (!(k > 0.0)) throw DomainError("geometry: wavenumber must be positive");
    if (!(r0 > 0.0)) throw DomainError("geometry: source radius must be positive");
    if (!(r >= r0))
      throw DomainError("geometry: measurement radius " + std::to_string(r) + " is inside the source disk (R0 = " +
                        std::to_string(r0) + ")");
  }

  /// Dimensionless form with R = 1: k = kappa, R0 = kappa0 / kappa.
  static ProblemGeometry from_size_parameters(double kappa0, double kappa) {
    if (!(kappa0 > 0.0) || !(kappa >= kappa0) || !std::isfinite(kappa))
      throw DomainError("geometry: need 0 < kappa0 <= kappa");
    return ProblemGeometry(kappa, kappa0 / kappa, 1.0);
  }

  double k() const noexcept { return k_; }
  double r0() const noexcept { return r0_; }
  double r() const noexcept { return r_; }
  double kappa0() const noexcept { return k_ * r0_; }
  double kappa() const noexcept { return k_ * r_; }
  double wavelength() const noexcept { return 2.0 * std::numbers::pi / k_; }

  friend bool operator==(const ProblemGeometry&, const ProblemGeometry&) = default;

 private:
  double k_;
  double r0_;
  double r_;
};

}  // namespace isp

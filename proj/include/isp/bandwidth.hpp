#pragma once

// Bandwidth of the singular spectrum (the index after which sigma_m is
// strictly decreasing) and its bounds from the first zeros of J_m and Y_m.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "isp/errors.hpp"
#include "isp/geometry.hpp"
#include "isp/log.hpp"
#include "isp/singular_system.hpp"
#include "isp/specfun.hpp"

namespace isp {

/// Smallest horizon accepted by bandwidth(): ceil(k0) + ceil(3 k0^(1/3)) + 20.
inline int minimum_horizon(double kappa0) {
  return static_cast<int>(std::ceil(kappa0) + std::ceil(3.0 * std::cbrt(kappa0)) + 20.0);
}

/// Number of trailing rows that must be strictly decreasing.
inline constexpr int tail_rows = 10;

/// Smallest m such that sigma is strictly decreasing on [m, M_max].
///
/// The defining quantifier runs over all n; the finite table stands in for
/// it only if it reaches well into the stopband, so short horizons and
/// tables whose last rows are not strictly decreasing raise HorizonError.
inline int bandwidth(const SpectrumTable& spectrum) {
  const int mmax = spectrum.horizon();
  const int need = minimum_horizon(spectrum.geometry().kappa0());
  if (mmax < need)
    throw HorizonError("bandwidth: horizon " + std::to_string(mmax) + " below required " + std::to_string(need));
  const auto& rows = spectrum.rows();
  for (int m = mmax - tail_rows; m < mmax; ++m) {
    if (!(rows[m].log_sigma > rows[m + 1].log_sigma))
      throw HorizonError("bandwidth: spectrum not strictly decreasing at the horizon tail (m = " +
                         std::to_string(m) + ")");
  }
  for (int m = mmax - 1; m >= 0; --m) {
    if (!(rows[m].log_sigma > rows[m + 1].log_sigma)) return m + 1;
  }
  return 0;
}

namespace detail {

// Real root of n^3 + a n - kappa0 = 0 (closed form, a > 0).
inline double cubic_root_closed_form(double a, double kappa0) {
  const double c = std::cbrt(108.0 * kappa0 + 12.0 * std::sqrt(12.0 * a * a * a + 81.0 * kappa0 * kappa0));
  return c / 6.0 - 2.0 * a / c;
}

inline constexpr double tie_tolerance = 1e-9;

template <class ZeroFn>
int first_order_reaching(double kappa0, double coeff, ZeroFn zero) {
  if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) throw DomainError("bandwidth bound: kappa0 must be positive");
  auto reaches = [&](int m) { return zero(m).value >= kappa0 - tie_tolerance; };
  const double n = cubic_root_closed_form(coeff, kappa0);
  int m = std::max(0, static_cast<int>(std::floor(n * n * n)) - 2);
  if (reaches(m)) {
    while (m > 0 && reaches(m - 1)) --m;
  } else {
    while (!reaches(m)) ++m;
  }
  return m;
}

}  // namespace detail

/// Lower bound: smallest m with j_{m,1} >= kappa0 (ties count as reached).
inline int bound_lower(double kappa0) { return detail::first_order_reaching(kappa0, j_zero_coeff, first_zero_j); }

/// Conjectured upper bound: smallest m with y_{m,1} >= kappa0.
inline int bound_upper(double kappa0) { return detail::first_order_reaching(kappa0, y_zero_coeff, first_zero_y); }

/// ceil(n^3) where n solves n^3 + 1.855757 n = kappa0.
inline int bound_lower_approx(double kappa0) {
  if (!(kappa0 > 0.0)) throw DomainError("bound_lower_approx: kappa0 must be positive");
  const double n = detail::cubic_root_closed_form(j_zero_coeff, kappa0);
  return static_cast<int>(std::ceil(n * n * n));
}

/// ceil(kappa0).
inline int bound_upper_approx(double kappa0) {
  if (!(kappa0 > 0.0)) throw DomainError("bound_upper_approx: kappa0 must be positive");
  return static_cast<int>(std::ceil(kappa0));
}

struct BandwidthReport {
  ProblemGeometry geometry;
  int bandwidth = 0;
  int lower = 0;
  int upper = 0;
  int lower_approx = 0;
  int upper_approx = 0;
  int horizon = 0;
  /// bandwidth <= upper; the upper bound is conjectured, so a violation is
  /// reported here and logged, never thrown.
  bool upper_holds = true;
};

inline BandwidthReport report(const ProblemGeometry& g, int horizon) {
  const SpectrumTable s = build_spectrum(g, horizon);
  BandwidthReport r{g};
  r.horizon = horizon;
  r.bandwidth = bandwidth(s);
  r.lower = bound_lower(g.kappa0());
  r.upper = bound_upper(g.kappa0());
  r.lower_approx = bound_lower_approx(g.kappa0());
  r.upper_approx = bound_upper_approx(g.kappa0());
  r.upper_holds = r.bandwidth <= r.upper;
  if (!r.upper_holds)
    logger().warn("upper bound violated: kappa0={} kappa={} B={} B+={}", g.kappa0(), g.kappa(), r.bandwidth,
                  r.upper);
  if (r.lower > r.bandwidth)
    logger().error("lower bound violated: kappa0={} kappa={} B={} B-={}", g.kappa0(), g.kappa(), r.bandwidth,
                   r.lower);
  return r;
}

inline BandwidthReport report(const ProblemGeometry& g) { return report(g, default_horizon(g.kappa0())); }

/// pi / B_-: the angular step below which equidistant sampling on the
/// measurement circle gains nothing. Throws when B_- = 0.
inline double max_angular_sampling(const ProblemGeometry& g) {
  const int b = bound_lower(g.kappa0());
  if (b == 0) throw DomainError("no stable band: lower bandwidth bound is 0 for kappa0 = " + std::to_string(g.kappa0()));
  return std::numbers::pi / b;
}

}  // namespace isp

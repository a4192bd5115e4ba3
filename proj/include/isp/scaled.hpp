#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace isp {

/// A double with an extended binary exponent: value = mant * 2^exp.
///
/// Recurrences for Bessel functions of large order leave the double range
/// long before the quantities built from them (ratios, products, logs) do.
/// Keeping the exponent separately lets those sequences be carried through
/// without overflow or underflow.
struct Scaled {
  double mant = 0.0;
  std::int64_t exp = 0;

  static Scaled from(double v) noexcept {
    Scaled s;
    int e = 0;
    s.mant = std::frexp(v, &e);
    s.exp = e;
    return s;
  }

  /// log|value|; -inf for zero.
  double log_abs() const noexcept {
    if (mant == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mant)) + static_cast<double>(exp) * std::numbers::ln2;
  }

  int sign() const noexcept { return (mant > 0.0) - (mant < 0.0); }

  /// Plain double; saturates to +-inf or flushes to 0 outside the range.
  double value() const noexcept {
    if (mant == 0.0) return 0.0;
    if (exp > 4096) return std::copysign(std::numeric_limits<double>::infinity(), mant);
    if (exp < -4096) return std::copysign(0.0, mant);
    return std::ldexp(mant, static_cast<int>(exp));
  }

  /// mant * 2^(exp - ref), flushed to zero when far below ref.
  double relative_to(std::int64_t ref) const noexcept {
    const std::int64_t d = exp - ref;
    if (mant == 0.0 || d < -1100) return 0.0;
    if (d > 1100) return std::copysign(std::numeric_limits<double>::infinity(), mant);
    return std::ldexp(mant, static_cast<int>(d));
  }
};

inline Scaled operator*(const Scaled& a, const Scaled& b) noexcept {
  Scaled r = Scaled::from(a.mant * b.mant);
  r.exp += a.exp + b.exp;
  return r;
}

/// log(a^2 + b^2) without forming either square.
inline double log_sum_squares(const Scaled& a, const Scaled& b) noexcept {
  if (a.mant == 0.0 && b.mant == 0.0) return -std::numeric_limits<double>::infinity();
  const std::int64_t ref = (a.mant == 0.0) ? b.exp : (b.mant == 0.0) ? a.exp : std::max(a.exp, b.exp);
  const double x = a.relative_to(ref);
  const double y = b.relative_to(ref);
  return std::log(x * x + y * y) + 2.0 * static_cast<double>(ref) * std::numbers::ln2;
}

}  // namespace isp

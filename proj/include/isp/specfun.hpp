#pragma once

// Integer-order Bessel functions of real positive argument, evaluated for
// the orders and arguments that occur in the singular system of the 2D
// Helmholtz source-to-field operator: orders up to ~1e4, arguments up to
// ~1e4, with values that span thousands of decades.
//
// J_m is computed by Miller's downward recurrence normalised with
// J_0 + 2 sum J_2k = 1. Y_0 and Y_1 come from the Neumann series over the
// same J sequence, and Y_m from the (stable) upward recurrence. Everything
// is carried in Scaled form so no intermediate overflows.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "isp/errors.hpp"
#include "isp/scaled.hpp"

namespace isp {

/// Coefficient of m^(1/3) in the large-order expansion of j_{m,1}.
inline constexpr double j_zero_coeff = 1.855757;
/// Coefficient of m^(1/3) in the large-order expansion of y_{m,1}.
inline constexpr double y_zero_coeff = 0.931577;

enum class ZeroKind { first, second };

/// First positive zero of J_m (kind == first) or Y_m (kind == second).
struct ZeroRecord {
  int order = 0;
  ZeroKind kind = ZeroKind::first;
  double value = 0.0;
};

namespace detail {

// Below this argument the two-term power series is exact to double precision.
inline constexpr double small_argument = 1e-8;

inline void require_order(int m, const char* fn) {
  if (m < 0) throw DomainError(std::string(fn) + ": negative order " + std::to_string(m));
}

inline void require_argument(double x, const char* fn, bool allow_zero) {
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
  if (x < 0.0 || (!allow_zero && x == 0.0))
    throw DomainError(std::string(fn) + ": argument must be positive, got " + std::to_string(x));
}

inline Scaled scaled_from_log(double log_abs, double sign) {
  const double e2 = std::floor(log_abs / std::numbers::ln2);
  Scaled s = Scaled::from(sign * std::exp(log_abs - e2 * std::numbers::ln2));
  s.exp += static_cast<std::int64_t>(e2);
  return s;
}

inline Scaled divide(const Scaled& a, const Scaled& b) {
  Scaled r = Scaled::from(a.mant / b.mant);
  r.exp += a.exp - b.exp;
  return r;
}

struct MillerResult {
  std::vector<Scaled> j;  // J_0 .. J_nmax
  double y0 = 0.0;
  double y1 = 0.0;
};

// Power series for tiny x: J_m = (x/2)^m/m! (1 - (x/2)^2/(m+1)).
inline MillerResult small_argument_series(int nmax, double x) {
  MillerResult r;
  r.j.resize(static_cast<std::size_t>(nmax) + 1);
  const double q = 0.25 * x * x;
  if (x == 0.0) {
    r.j[0] = Scaled::from(1.0);
    for (int m = 1; m <= nmax; ++m) r.j[m] = Scaled{};
    r.y0 = r.y1 = -std::numeric_limits<double>::infinity();
    return r;
  }
  const double lhalf = std::log(0.5 * x);
  for (int m = 0; m <= nmax; ++m) {
    const double lead = m * lhalf - std::lgamma(m + 1.0);
    r.j[m] = scaled_from_log(lead + std::log1p(-q / (m + 1.0)), 1.0);
  }
  const double L = lhalf + std::numbers::egamma;
  r.y0 = 2.0 / std::numbers::pi * (L * (1.0 - q) + q);
  r.y1 = -2.0 / (std::numbers::pi * x) + x / std::numbers::pi * (L - 0.5);
  return r;
}

// Miller downward recurrence. Also accumulates the Neumann-series sums that
// give Y_0 and Y_1 from the same (unnormalised) sequence:
//   Y_0 = (2/pi) [ (ln(x/2)+gamma) J_0 - 2 sum_k (-1)^k J_2k / k ]
//   Y_1 = -(2/pi) [ J_0/x - (ln(x/2)+gamma) J_1 - T_1 ],
//   T_1 = -J_1 + sum_{j>=1} (-1)^(j+1) (1/j + 1/(j+1)) J_{2j+1}.
inline MillerResult miller(int nmax, double x) {
  if (x < small_argument) return small_argument_series(nmax, x);

  const double top = std::max(static_cast<double>(nmax), std::ceil(x));
  int start = static_cast<int>(top + 30.0 + std::ceil(12.0 * std::cbrt(top)));
  start += start % 2;

  MillerResult r;
  r.j.resize(static_cast<std::size_t>(nmax) + 1);

  double fp1 = 0.0;
  double f = 1.0;
  std::int64_t scale = 0;  // true value = stored * 2^scale
  double norm = 2.0 * f;   // J_0 + 2 sum J_2k, start is even
  double t0 = (start / 2 % 2 == 0 ? 1.0 : -1.0) * f / (start / 2);
  double t1 = 0.0;

  for (int m = start; m >= 1; --m) {
    const double fm1 = (2.0 * m / x) * f - fp1;
    fp1 = f;
    f = fm1;
    const int n = m - 1;
    if (n == 0) {
      norm += f;
    } else if (n % 2 == 0) {
      norm += 2.0 * f;
      const int k = n / 2;
      t0 += ((k % 2 == 0) ? 1.0 : -1.0) * f / k;
    } else if (n == 1) {
      t1 -= f;
    } else {
      const int jj = (n - 1) / 2;
      t1 += ((jj % 2 == 1) ? 1.0 : -1.0) * (1.0 / jj + 1.0 / (jj + 1)) * f;
    }
    if (n <= nmax) {
      Scaled s = Scaled::from(f);
      s.exp += scale;
      r.j[n] = s;
    }
    if (std::abs(f) > 0x1p200) {
      int e = 0;
      std::frexp(f, &e);
      f = std::ldexp(f, -e);
      fp1 = std::ldexp(fp1, -e);
      norm = std::ldexp(norm, -e);
      t0 = std::ldexp(t0, -e);
      t1 = std::ldexp(t1, -e);
      scale += e;
    }
  }

  Scaled s_norm = Scaled::from(norm);
  s_norm.exp += scale;
  for (auto& v : r.j) v = (v.mant == 0.0) ? Scaled{} : divide(v, s_norm);

  // f, fp1 now hold J_0, J_1 in the final units.
  const double j0 = f / norm;
  const double j1 = fp1 / norm;
  const double L = std::log(0.5 * x) + std::numbers::egamma;
  r.y0 = 2.0 / std::numbers::pi * (L * j0 - 2.0 * t0 / norm);
  r.y1 = -2.0 / std::numbers::pi * (j0 / x - L * j1 - t1 / norm);
  return r;
}

inline std::vector<Scaled> upward_y(int nmax, double x, double y0, double y1) {
  std::vector<Scaled> y(static_cast<std::size_t>(nmax) + 1);
  y[0] = Scaled::from(y0);
  if (nmax == 0) return y;
  y[1] = Scaled::from(y1);
  if (!std::isfinite(2.0 * nmax / x))
    throw DomainError("bessel_y: argument too small for order " + std::to_string(nmax));
  // Carry (prev, cur) normalised to |cur| in [0.5, 1).
  double prev = y0, cur = y1;
  std::int64_t scale = 0;
  {
    int e = 0;
    std::frexp(cur, &e);
    cur = std::ldexp(cur, -e);
    prev = std::ldexp(prev, -e);
    scale = e;
  }
  for (int m = 1; m < nmax; ++m) {
    const double next = (2.0 * m / x) * cur - prev;
    prev = cur;
    cur = next;
    int e = 0;
    std::frexp(cur, &e);
    cur = std::ldexp(cur, -e);
    prev = std::ldexp(prev, -e);
    scale += e;
    Scaled s;
    s.mant = cur;
    s.exp = scale;
    y[m + 1] = s;
  }
  return y;
}

}  // namespace detail

/// J_0(x) .. J_nmax(x) in extended-exponent form. x >= 0.
inline std::vector<Scaled> bessel_j_scaled(int nmax, double x) {
  detail::require_order(nmax, "bessel_j");
  detail::require_argument(x, "bessel_j", true);
  return detail::miller(nmax, x).j;
}

/// Y_0(x) .. Y_nmax(x) in extended-exponent form. x > 0.
inline std::vector<Scaled> bessel_y_scaled(int nmax, double x) {
  detail::require_order(nmax, "bessel_y");
  detail::require_argument(x, "bessel_y", false);
  const auto mr = detail::miller(1, x);
  return detail::upward_y(nmax, x, mr.y0, mr.y1);
}

/// J_m(x) for m >= 0, x >= 0 (J_m(0) is the limit value).
inline double bessel_j(int m, double x) { return bessel_j_scaled(m, x)[m].value(); }

/// Y_m(x) for m >= 0, x > 0. Saturates to -inf once |Y_m| exceeds the
/// double range; use log_hankel_abs2 for large-order magnitudes.
inline double bessel_y(int m, double x) { return bessel_y_scaled(m, x)[m].value(); }

/// Both Hankel components J_m, Y_m for m = 0..nmax from a single recurrence pass.
struct HankelSequence {
  std::vector<Scaled> j;
  std::vector<Scaled> y;
};

inline HankelSequence hankel_sequence(int nmax, double x) {
  detail::require_order(nmax, "hankel_sequence");
  detail::require_argument(x, "hankel_sequence", false);
  auto mr = detail::miller(std::max(nmax, 1), x);
  HankelSequence h;
  h.y = detail::upward_y(nmax, x, mr.y0, mr.y1);
  mr.j.resize(static_cast<std::size_t>(nmax) + 1);
  h.j = std::move(mr.j);
  return h;
}

/// log(J_m(x)^2 + Y_m(x)^2) for m = 0..nmax.
inline std::vector<double> log_hankel_abs2_all(int nmax, double x) {
  const auto h = hankel_sequence(nmax, x);
  std::vector<double> out(h.j.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = log_sum_squares(h.j[m], h.y[m]);
  return out;
}

/// log |H_m^(1)(x)|^2, overflow-free for large orders.
inline double log_hankel_abs2(int m, double x) { return log_hankel_abs2_all(m, x)[m]; }

/// arg H_m^(1)(x) = atan2(Y_m, J_m), computed on a jointly rescaled pair.
inline double hankel_phase(const Scaled& j, const Scaled& y) {
  const std::int64_t ref = std::max(j.exp, y.exp);
  return std::atan2(y.relative_to(ref), j.relative_to(ref));
}

inline double hankel_phase(int m, double x) {
  const auto h = hankel_sequence(m, x);
  return hankel_phase(h.j[m], h.y[m]);
}

/// H_0^(1)(x) = J_0(x) + i Y_0(x), x > 0.
inline std::complex<double> hankel1_0(double x) {
  detail::require_argument(x, "hankel1_0", false);
  const auto mr = detail::miller(0, x);
  return {mr.j[0].value(), mr.y0};
}

namespace detail {

inline double log_k0(double z) {
  if (z < 500.0) return std::log(boost::math::cyl_bessel_k(0, std::max(z, 1e-300)));
  const double w = 1.0 / (8.0 * z);
  const double series = 1.0 - w + 4.5 * w * w - 37.5 * w * w * w;
  return -z + 0.5 * std::log(std::numbers::pi / (2.0 * z)) + std::log(series);
}

inline double log_cosh(double u) { return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2; }

}  // namespace detail

/// Independent evaluation of log |H_m^(1)(x)|^2 from Nicholson's integral
///   |H_m^(1)(x)|^2 = 8/pi^2 int_0^inf K_0(2x sinh t) cosh(2mt) dt,
/// integrated by tanh-sinh quadrature in log-scaled form. Test oracle only.
inline double nicholson_log_abs2(int m, double x, double tol = 1e-13) {
  detail::require_order(m, "nicholson_log_abs2");
  detail::require_argument(x, "nicholson_log_abs2", false);

  auto log_f = [m, x](double t) {
    return detail::log_k0(2.0 * x * std::sinh(t)) + detail::log_cosh(2.0 * m * t);
  };
  const double peak = (m > x) ? std::acosh(m / x) : 0.0;
  const double ref = (peak > 0.0) ? log_f(peak) : log_f(std::min(0.5, 1.0 / (2.0 * x)));

  // Past the peak the integrand decays like exp(-2x sinh t + 2mt).
  double upper = std::max(peak, 0.0) + std::max(1.0 / x, 0.05);
  for (int it = 0; log_f(upper) > ref - 60.0; ++it) {
    if (it > 200) throw ConvergenceError("nicholson_log_abs2: no tail cut-off found", 1.0);
    upper = 1.5 * upper + 0.1;
  }

  auto f = [&](double t) { return std::exp(log_f(t) - ref); };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0, err_total = 0.0;
  auto piece = [&](double a, double b) {
    double err = 0.0, l1 = 0.0;
    total += integrator.integrate(f, a, b, tol, &err, &l1);
    err_total += err;
  };
  if (peak > 0.0) piece(0.0, peak);
  piece(std::max(peak, 0.0), upper);

  const double tail = std::exp(log_f(upper) - ref) * upper;
  const double rel = (err_total + tail) / total;
  if (!(rel < 1e-9)) throw ConvergenceError("nicholson_log_abs2: quadrature did not converge", rel);
  return std::log(8.0 / (std::numbers::pi * std::numbers::pi)) + ref + std::log(total);
}

namespace detail {

// Value and derivative of J_m or Y_m at x.
inline std::pair<double, double> cylinder_and_derivative(ZeroKind kind, int m, double x) {
  const int n = std::max(m, 1);
  std::vector<Scaled> seq = (kind == ZeroKind::first) ? bessel_j_scaled(n, x) : bessel_y_scaled(n, x);
  const double v = seq[m].value();
  const double dv = (m == 0) ? -seq[1].value() : seq[m - 1].value() - m / x * v;
  return {v, dv};
}

// Safeguarded Newton on a sign-change bracket [a, b].
inline double refine_root(ZeroKind kind, int m, double a, double b, double guess) {
  double fa = cylinder_and_derivative(kind, m, a).first;
  double x = std::clamp(guess, a, b);
  for (int it = 0; it < 50; ++it) {
    const auto [v, dv] = cylinder_and_derivative(kind, m, x);
    if (v == 0.0) return x;
    if ((v > 0.0) == (fa > 0.0)) {
      a = x;
      fa = v;
    } else {
      b = x;
    }
    double next = x - v / dv;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 1e-15 * x || b - a <= 4e-16 * b) return next;
    x = next;
  }
  // Bisection fallback.
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    const double mid = 0.5 * (a + b);
    const double v = cylinder_and_derivative(kind, m, mid).first;
    if ((v > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = v;
    } else {
      b = mid;
    }
  }
  if (b - a > 1e-10) throw ConvergenceError("zero refinement failed for order " + std::to_string(m), b - a);
  return 0.5 * (a + b);
}

}  // namespace detail

/// First positive zero j_{m,1} of J_m.
///
/// Scans upward from x = m (where J_m > 0) with a step smaller than the
/// zero spacing, so the bracket found is the first sign change; then
/// refines with safeguarded Newton started at m + 1.855757 m^(1/3).
inline ZeroRecord first_zero_j(int m) {
  detail::require_order(m, "first_zero_j");
  const double lo = (m == 0) ? 1.0 : static_cast<double>(m);
  const double step = 0.5 * std::max(1.0, std::cbrt(static_cast<double>(m)));
  double a = lo;
  if (!(detail::cylinder_and_derivative(ZeroKind::first, m, a).first > 0.0))
    throw ConvergenceError("first_zero_j: J_m not positive at scan start", 0.0);
  double b = a + step;
  for (int it = 0; detail::cylinder_and_derivative(ZeroKind::first, m, b).first > 0.0; ++it) {
    if (it > 1000) throw ConvergenceError("first_zero_j: no sign change found", step);
    a = b;
    b += step;
  }
  const double guess = (m == 0) ? 2.404825557695773 : m + j_zero_coeff * std::cbrt(static_cast<double>(m));
  return {m, ZeroKind::first, detail::refine_root(ZeroKind::first, m, a, b, guess)};
}

/// First positive zero y_{m,1} of Y_m, bracketed by (max(m, 0.1), j_{m,1})
/// through the interlacing y_{m,1} < j_{m,1} < y_{m,2}.
inline ZeroRecord first_zero_y(int m) {
  detail::require_order(m, "first_zero_y");
  const double a = (m == 0) ? 0.1 : static_cast<double>(m);
  const double b = first_zero_j(m).value;
  const double ya = detail::cylinder_and_derivative(ZeroKind::second, m, a).first;
  const double yb = detail::cylinder_and_derivative(ZeroKind::second, m, b).first;
  if (!(ya < 0.0 && yb > 0.0))
    throw ConvergenceError("first_zero_y: interlacing bracket has no sign change for order " + std::to_string(m), b - a);
  const double guess = (m == 0) ? 0.8935769662791675 : m + y_zero_coeff * std::cbrt(static_cast<double>(m));
  return {m, ZeroKind::second, detail::refine_root(ZeroKind::second, m, a, b, guess)};
}

/// J_mu(x) for real mu >= 0 from the ascending series
///   sum_k (-1)^k (x/2)^(mu+2k) / (k! Gamma(mu+k+1)).
/// Cancellation limits it to x <= 30 (about 1e-8 absolute at the top end).
inline double bessel_j_real_order(double mu, double x) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("bessel_j_real_order: order must be >= 0");
  detail::require_argument(x, "bessel_j_real_order", false);
  if (x > 30.0) throw DomainError("bessel_j_real_order: argument above 30 loses too many digits");
  const long double lh = std::log(0.5L * x);
  long double sum = 0.0L;
  for (int k = 0; k < 400; ++k) {
    const long double lt = (mu + 2.0L * k) * lh - std::lgamma(k + 1.0L) - std::lgamma(mu + k + 1.0L);
    const long double term = std::exp(lt);
    sum += (k % 2 == 0) ? term : -term;
    if (k > x && term < 1e-22L * std::max(std::abs(sum), 1e-300L)) break;
  }
  return static_cast<double>(sum);
}

/// Zeros of mu -> J_mu(x) on [0, mu_max], located by scanning in mu and
/// bisecting each sign change to ~1e-12.
inline std::vector<double> order_zeros_j(double x, double mu_max, double step = 0.02) {
  std::vector<double> zeros;
  double a = 0.0;
  double fa = bessel_j_real_order(a, x);
  for (double b = step; b <= mu_max + 0.5 * step; b += step) {
    const double fb = bessel_j_real_order(b, x);
    if (fa == 0.0) zeros.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j_real_order(mid, x);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

}  // namespace isp

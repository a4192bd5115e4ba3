#pragma once

// Independent reference evaluations used only by the tests: 50-digit power
// series for J_m and Y_m, bisection, and adaptive quadrature.

#include <cmath>
#include <functional>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

/// J_m(x) = sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!).
inline double bessel_j(int m, double xd) {
  const mp x = xd;
  const mp h = x / 2;
  mp term = 1;
  for (int i = 1; i <= m; ++i) term *= h / i;
  mp sum = term;
  const mp h2 = h * h;
  for (int k = 1; k < 2000; ++k) {
    term *= -h2 / (mp(k) * mp(k + m));
    sum += term;
    if (k > h && abs(term) < abs(sum) * mp("1e-45")) break;
  }
  return static_cast<double>(sum);
}

/// Integer-order Y_m(x) from the series with digamma terms.
inline double bessel_y(int n, double xd) {
  using boost::math::constants::euler;
  using boost::math::constants::pi;
  const mp x = xd;
  const mp h = x / 2;
  const mp h2 = h * h;

  // finite part: -(1/pi) sum_{k<n} (n-k-1)!/k! (x/2)^(2k-n)
  mp fin = 0;
  if (n > 0) {
    mp fact = 1;  // (n-1)!
    for (int i = 2; i < n; ++i) fact *= i;
    mp t = fact * pow(h, -n);
    for (int k = 0; k < n; ++k) {
      fin += t;
      if (k + 1 < n) t *= h2 / (mp(k + 1) * mp(n - k - 1));
    }
  }

  // digamma(k+1) = -gamma + H_k
  mp hk = 0, hnk = 0;
  for (int i = 1; i <= n; ++i) hnk += mp(1) / i;
  mp term = 1;
  for (int i = 1; i <= n; ++i) term *= h / i;
  mp inf = 0;
  for (int k = 0; k < 4000; ++k) {
    if (k > 0) {
      hk += mp(1) / k;
      hnk += mp(1) / (n + k);
      term *= -h2 / (mp(k) * mp(k + n));
    }
    const mp c = (hk + hnk - 2 * euler<mp>()) * term;
    inf += c;
    if (k > h && abs(c) < mp("1e-45") * (abs(inf) + 1e-300)) break;
  }
  const mp jn = bessel_j(n, xd);
  const mp y = -fin / pi<mp>() + 2 / pi<mp>() * log(h) * jn - inf / pi<mp>();
  return static_cast<double>(y);
}

inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-15) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > tol * std::max(1.0, std::abs(a)); ++i) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

/// Adaptive Gauss-Kronrod on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace oracle

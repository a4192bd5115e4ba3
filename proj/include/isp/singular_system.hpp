#pragma once

// Closed-form singular system of the source-to-field operator
//   (F s)(x) = int_{D0} H_0^(1)(k|x - y|) s(y) dy,   x on the circle |x| = R,
// with
//   sigma_m = sqrt(2R) pi R0 |H_m^(1)(kR)| A_m(kR0),
//   psi_m(y) = (sqrt(pi) R0 A_m)^-1 J_m(k|y|) e^{i m arg y},
//   phi_m(x) = (2 pi R)^-1/2 e^{i arg H_m^(1)(kR)} e^{i m arg x},
//   A_m(t)^2 = J_m(t)^2 - J_{m-1}(t) J_{m+1}(t).
// All magnitudes are carried as logarithms; sigma_m spans hundreds of
// decades over a typical horizon.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "isp/errors.hpp"
#include "isp/geometry.hpp"
#include "isp/scaled.hpp"
#include "isp/specfun.hpp"

namespace isp {

namespace detail {

// log A_m from J_{m-1}, J_m, J_{m+1} without leaving the scaled domain.
// Returns -inf when A_m vanishes; throws if the radicand is negative beyond
// round-off.
inline double log_a_from(const Scaled& jm1, const Scaled& jm, const Scaled& jp1, int m) {
  const Scaled p = jm * jm;
  const Scaled q = jm1 * jp1;
  std::int64_t ref = std::max(p.mant != 0.0 ? p.exp : INT64_MIN / 2, q.mant != 0.0 ? q.exp : INT64_MIN / 2);
  if (p.mant == 0.0 && q.mant == 0.0) return -std::numeric_limits<double>::infinity();
  const double pv = p.relative_to(ref);
  const double qv = q.relative_to(ref);
  double d = pv - qv;
  const double scale = std::abs(pv) + std::abs(qv);
  if (d < 0.0) {
    if (d < -1e-14 * scale)
      throw NumericError("A_m radicand negative beyond round-off at m = " + std::to_string(m));
    d = 0.0;
  }
  if (d == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * (std::log(d) + static_cast<double>(ref) * std::numbers::ln2);
}

}  // namespace detail

/// log A_m(kappa0) for m = 0..mmax (A_{-m} = A_m).
inline std::vector<double> log_a_all(int mmax, double kappa0) {
  if (mmax < 0) throw DomainError("log_a_all: negative order");
  if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) throw DomainError("log_a_all: kappa0 must be positive");
  const auto j = bessel_j_scaled(mmax + 1, kappa0);
  std::vector<double> out(static_cast<std::size_t>(mmax) + 1);
  for (int m = 0; m <= mmax; ++m) {
    // J_{-1} = -J_1
    Scaled jm1 = (m == 0) ? Scaled{-j[1].mant, j[1].exp} : j[m - 1];
    out[m] = detail::log_a_from(jm1, j[m], j[m + 1], m);
  }
  return out;
}

/// A_m(kappa0) = sqrt(J_m^2 - J_{m-1} J_{m+1}); symmetric in m.
inline double a_m(int m, double kappa0) {
  const int n = std::abs(m);
  return std::exp(log_a_all(n, kappa0)[n]);
}

/// log sigma_m for the given geometry; -inf when A_m = 0.
inline double log_sigma(int m, const ProblemGeometry& g) {
  const int n = std::abs(m);
  const double la = log_a_all(n, g.kappa0())[n];
  const double lh = log_hankel_abs2(n, g.kappa());
  return 0.5 * std::log(2.0 * g.r()) + std::log(std::numbers::pi) + std::log(g.r0()) + 0.5 * lh + la;
}

/// Horizon used when none is given: ceil(kappa0) + ceil(3 kappa0^(1/3)) + 40.
inline int default_horizon(double kappa0) {
  return static_cast<int>(std::ceil(kappa0) + std::ceil(3.0 * std::cbrt(kappa0)) + 40.0);
}

struct SpectrumRow {
  int m = 0;
  double a = 0.0;           // A_m(kappa0)
  double log_abs_h2 = 0.0;  // log |H_m^(1)(kappa)|^2
  double log_sigma = 0.0;
  double sigma = 0.0;  // 0 when exp(log_sigma) underflows
};

/// sigma_m and its ingredients for m = 0..M_max. Immutable once built.
class SpectrumTable {
 public:
  SpectrumTable(ProblemGeometry g, std::vector<SpectrumRow> rows, std::vector<double> phases)
      : geometry_(g), rows_(std::move(rows)), phases_(std::move(phases)) {}

  const ProblemGeometry& geometry() const noexcept { return geometry_; }
  int horizon() const noexcept { return static_cast<int>(rows_.size()) - 1; }
  const std::vector<SpectrumRow>& rows() const noexcept { return rows_; }

  /// Row for |m|; sigma and A depend only on |m|.
  const SpectrumRow& row(int m) const {
    const int n = std::abs(m);
    if (n > horizon()) throw DomainError("spectrum: mode " + std::to_string(m) + " beyond horizon");
    return rows_[n];
  }

  double sigma(int m) const { return row(m).sigma; }
  double log_sigma(int m) const { return row(m).log_sigma; }

  /// arg H_m^(1)(kappa) for signed m (H_{-m} = (-1)^m H_m).
  double hankel_phase(int m) const {
    const int n = std::abs(m);
    row(n);
    double p = phases_[n];
    if (m < 0 && n % 2 == 1) p += std::numbers::pi;
    return p;
  }

 private:
  ProblemGeometry geometry_;
  std::vector<SpectrumRow> rows_;
  std::vector<double> phases_;
};

inline SpectrumTable build_spectrum(const ProblemGeometry& g, int mmax) {
  if (mmax < 1) throw DomainError("build_spectrum: M_max must be >= 1");
  const auto la = log_a_all(mmax, g.kappa0());
  const auto h = hankel_sequence(mmax, g.kappa());
  const double lconst = 0.5 * std::log(2.0 * g.r()) + std::log(std::numbers::pi) + std::log(g.r0());

  std::vector<SpectrumRow> rows(static_cast<std::size_t>(mmax) + 1);
  std::vector<double> phases(rows.size());
  for (int m = 0; m <= mmax; ++m) {
    SpectrumRow& r = rows[m];
    r.m = m;
    r.a = std::exp(la[m]);
    r.log_abs_h2 = log_sum_squares(h.j[m], h.y[m]);
    r.log_sigma = lconst + 0.5 * r.log_abs_h2 + la[m];
    r.sigma = std::exp(r.log_sigma);
    phases[m] = hankel_phase(h.j[m], h.y[m]);
  }
  return SpectrumTable(g, std::move(rows), std::move(phases));
}

inline SpectrumTable build_spectrum(const ProblemGeometry& g) { return build_spectrum(g, default_horizon(g.kappa0())); }

/// Raised by psi_eval when A_m = 0: psi_m has no normalisation.
class DegenerateModeError : public NumericError {
 public:
  explicit DegenerateModeError(int m) : NumericError("mode " + std::to_string(m) + " has A_m = 0"), mode_(m) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

/// J_m(x) for signed m, via J_{-m} = (-1)^m J_m.
inline double bessel_j_signed(int m, double x) {
  const int n = std::abs(m);
  const double v = bessel_j(n, x);
  return (m < 0 && n % 2 == 1) ? -v : v;
}

/// Right singular function psi_m at the polar point (rho, theta), rho <= R0.
inline std::complex<double> psi_eval(int m, const ProblemGeometry& g, double rho, double theta) {
  if (!(rho >= 0.0) || rho > g.r0() * (1.0 + 1e-12))
    throw DomainError("psi_eval: point outside the source disk");
  const double a = a_m(m, g.kappa0());
  if (a == 0.0) throw DegenerateModeError(m);
  const double amp = bessel_j_signed(m, g.k() * rho) / (std::sqrt(std::numbers::pi) * g.r0() * a);
  return std::polar(1.0, m * theta) * amp;
}

/// Left singular function phi_m on the measurement circle at angle theta.
inline std::complex<double> phi_eval(int m, const ProblemGeometry& g, double theta) {
  const int n = std::abs(m);
  double phase = hankel_phase(n, g.kappa());
  if (m < 0 && n % 2 == 1) phase += std::numbers::pi;
  return std::polar(1.0 / std::sqrt(2.0 * std::numbers::pi * g.r()), phase + m * theta);
}

}  // namespace isp

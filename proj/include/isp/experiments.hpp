#pragma once

// Parameter sweeps over the size parameter, linear fits of the bandwidth,
// the measurement-radius study and the large/small-argument checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "isp/bandwidth.hpp"
#include "isp/errors.hpp"
#include "isp/geometry.hpp"
#include "isp/singular_system.hpp"

namespace isp {

struct SweepRecord {
  double kappa = 0.0;
  double kappa0 = 0.0;
  int b = 0;
  int b_minus = 0;
  int b_plus = 0;
  int b_tilde_minus = 0;
  int b_tilde_plus = 0;
  int eps_minus = 0;
  int eps_plus = 0;
  double relerr_minus = 0.0;
  double relerr_plus = 0.0;
};

namespace detail {

// |estimate - b| / b; 0 when both vanish, +inf when only b does.
inline double relative_miss(int estimate, int b) {
  if (b > 0) return std::abs(estimate - b) / static_cast<double>(b);
  return estimate == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline SweepRecord sweep_point(const ProblemGeometry& g) {
  const BandwidthReport r = [&] {
    try {
      return report(g);
    } catch (const Error& e) {
      throw NumericError("sweep failed at kappa = " + std::to_string(g.kappa()) + ": " + e.what());
    }
  }();
  SweepRecord s;
  s.kappa = g.kappa();
  s.kappa0 = g.kappa0();
  s.b = r.bandwidth;
  s.b_minus = r.lower;
  s.b_plus = r.upper;
  s.b_tilde_minus = r.lower_approx;
  s.b_tilde_plus = r.upper_approx;
  s.eps_minus = s.b_minus - s.b;
  s.eps_plus = s.b_plus - s.b;
  s.relerr_minus = detail::relative_miss(s.b_minus, s.b);
  s.relerr_plus = detail::relative_miss(s.b_plus, s.b);
  return s;
}

/// n points uniform over [lo, hi], endpoints included. The grid variable is
/// kappa0; kappa = radius_ratio * kappa0 (radius_ratio = R / R0 >= 1).
inline std::vector<SweepRecord> run_sweep(int n = 300, double lo = 2.0, double hi = 100.0 * std::numbers::pi,
                                          double radius_ratio = 1.0) {
  if (n < 2) throw DomainError("run_sweep: need at least 2 points");
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("run_sweep: need 0 < lo < hi");
  if (!(radius_ratio >= 1.0)) throw DomainError("run_sweep: radius ratio must be >= 1");
  std::vector<SweepRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double k0 = lo + i * (hi - lo) / (n - 1);
    out.push_back(sweep_point(ProblemGeometry::from_size_parameters(k0, radius_ratio * k0)));
  }
  return out;
}

enum class FitTarget { b, b_minus, b_plus };

inline std::string to_string(FitTarget t) {
  switch (t) {
    case FitTarget::b: return "B";
    case FitTarget::b_minus: return "B_minus";
    case FitTarget::b_plus: return "B_plus";
  }
  return "?";
}

struct RegressionFit {
  FitTarget target = FitTarget::b;
  double slope = 0.0;
  double intercept = 0.0;
  double mean_abs_error = 0.0;
  /// Standard error of the slope estimate.
  double std_dev = 0.0;
};

inline int target_value(const SweepRecord& r, FitTarget t) {
  switch (t) {
    case FitTarget::b: return r.b;
    case FitTarget::b_minus: return r.b_minus;
    case FitTarget::b_plus: return r.b_plus;
  }
  return 0;
}

/// Ordinary least squares of the target against kappa0.
inline RegressionFit fit_linear(const std::vector<SweepRecord>& records, FitTarget target) {
  const std::size_t n = records.size();
  if (n < 2) throw DomainError("fit_linear: need at least 2 records");
  double mx = 0.0, my = 0.0;
  for (const auto& r : records) {
    mx += r.kappa0;
    my += target_value(r, target);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : records) {
    sxx += (r.kappa0 - mx) * (r.kappa0 - mx);
    sxy += (r.kappa0 - mx) * (target_value(r, target) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_linear: all abscissae equal");

  RegressionFit f;
  f.target = target;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double abs_sum = 0.0, sq_sum = 0.0;
  for (const auto& r : records) {
    const double res = target_value(r, target) - (f.slope * r.kappa0 + f.intercept);
    abs_sum += std::abs(res);
    sq_sum += res * res;
  }
  f.mean_abs_error = abs_sum / static_cast<double>(n);
  f.std_dev = n > 2 ? std::sqrt(sq_sum / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}

/// Smallest sweep kappa0 from which every later record has miss < tol,
/// where miss is selected by `which`. NaN if the last record still misses.
template <class Miss>
double settles_below(const std::vector<SweepRecord>& records, double tol, Miss which) {
  double at = std::numeric_limits<double>::quiet_NaN();
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (!(which(*it) < tol)) break;
    at = it->kappa0;
  }
  return at;
}

/// Smallest kappa0 on a fine uniform scan of [lo, hi] with bandwidth >= 1
/// (kappa = kappa0). NaN if none.
inline double zero_bandwidth_threshold(double lo = 1.0, double hi = 4.0, double step = 0.005) {
  const int n = static_cast<int>(std::ceil((hi - lo) / step));
  for (int i = 0; i <= n; ++i) {
    const double k0 = lo + i * step;
    if (bandwidth(build_spectrum(ProblemGeometry::from_size_parameters(k0, k0))) >= 1) return k0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct RadiusStudyRow {
  double ratio = 1.0;
  BandwidthReport report;
  double peak_log_sigma = 0.0;
};

/// Bandwidth and peak singular value for measurement radii R = ratio * R0.
inline std::vector<RadiusStudyRow> r_independence_study(double kappa0, const std::vector<double>& ratios) {
  std::vector<RadiusStudyRow> out;
  for (double q : ratios) {
    if (!(q >= 1.0)) throw DomainError("r_independence_study: ratios must be >= 1");
    const auto g = ProblemGeometry::from_size_parameters(kappa0, q * kappa0);
    const SpectrumTable s = build_spectrum(g);
    RadiusStudyRow row{q, report(g), -std::numeric_limits<double>::infinity()};
    for (const auto& r : s.rows()) row.peak_log_sigma = std::max(row.peak_log_sigma, r.log_sigma);
    out.push_back(row);
  }
  return out;
}

/// Large-argument plateau (sqrt 2 / pi) lambda sqrt(R0).
inline double plateau_level(const ProblemGeometry& g) {
  return std::numbers::sqrt2 / std::numbers::pi * g.wavelength() * std::sqrt(g.r0());
}

/// Small-argument decay (1/m) sqrt(2/(m+1)) (R0/R)^(m - 1/2) R0^(3/2), m >= 1.
inline double decay_level(const ProblemGeometry& g, int m) {
  if (m < 1) throw DomainError("decay_level: m must be >= 1");
  return std::sqrt(2.0 / (m + 1.0)) / m * std::pow(g.r0() / g.r(), m - 0.5) * std::pow(g.r0(), 1.5);
}

struct AsymptoticRow {
  double kappa0 = 0.0;
  double kappa = 0.0;
  int m = 0;
  double sigma = 0.0;
  double plateau = 0.0;
  double plateau_deviation = 0.0;
  bool plateau_in_regime = false;  // kappa0 >= 4 max(m^2 - 1/4, 1)
  double decay = std::numeric_limits<double>::quiet_NaN();
  double decay_deviation = std::numeric_limits<double>::quiet_NaN();
  bool decay_in_regime = false;  // m >= 1 and kappa^2 <= (m + 1) / 4
};

/// Relative deviation of sigma_m from both asymptotic formulas for each
/// geometry and m in [m_lo, m_hi]. Out-of-regime rows are flagged, not dropped.
inline std::vector<AsymptoticRow> asymptotic_checks(const std::vector<ProblemGeometry>& gs, int m_lo, int m_hi) {
  if (m_lo < 0 || m_hi < m_lo) throw DomainError("asymptotic_checks: bad mode range");
  std::vector<AsymptoticRow> out;
  for (const auto& g : gs) {
    const SpectrumTable s = build_spectrum(g, std::max(m_hi, 1));
    for (int m = m_lo; m <= m_hi; ++m) {
      AsymptoticRow r;
      r.kappa0 = g.kappa0();
      r.kappa = g.kappa();
      r.m = m;
      r.sigma = s.sigma(m);
      r.plateau = plateau_level(g);
      r.plateau_deviation = std::abs(r.sigma - r.plateau) / r.plateau;
      r.plateau_in_regime = g.kappa0() >= 4.0 * std::max(m * m - 0.25, 1.0);
      if (m >= 1) {
        r.decay = decay_level(g, m);
        r.decay_deviation = std::abs(r.sigma - r.decay) / r.decay;
        r.decay_in_regime = g.kappa() * g.kappa() <= (m + 1.0) / 4.0;
      }
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace isp

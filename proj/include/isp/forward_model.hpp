#pragma once

// Discretisations of the source-to-field operator: sampled sources on a
// polar grid, boundary data on the measurement circle, the weighted
// forward matrix and the modal (analytic) forward map.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "isp/errors.hpp"
#include "isp/geometry.hpp"
#include "isp/log.hpp"
#include "isp/quadrature.hpp"
#include "isp/singular_system.hpp"
#include "isp/specfun.hpp"

namespace isp {

using cplx = std::complex<double>;

/// Gauss-Legendre in radius on (0, R0) times the trapezoid rule in angle.
class PolarGrid {
 public:
  PolarGrid(const ProblemGeometry& g, int n_r, int n_theta) : geometry_(g), n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 1 || n_theta < 1) throw DomainError("polar grid: need positive node counts");
    auto rule = gauss_legendre(n_r, 0.0, g.r0());
    rho_ = std::move(rule.nodes);
    radial_weight_.resize(rho_.size());
    for (std::size_t i = 0; i < rho_.size(); ++i) radial_weight_[i] = rule.weights[i] * rho_[i];
  }

  const ProblemGeometry& geometry() const noexcept { return geometry_; }
  int n_r() const noexcept { return n_r_; }
  int n_theta() const noexcept { return n_theta_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_r_) * n_theta_; }

  double rho(int i) const { return rho_[i]; }
  double theta(int l) const { return 2.0 * std::numbers::pi * l / n_theta_; }
  double dtheta() const noexcept { return 2.0 * std::numbers::pi / n_theta_; }
  /// Radial weight including the Jacobian rho.
  double radial_weight(int i) const { return radial_weight_[i]; }
  double area_weight(int i) const { return radial_weight_[i] * dtheta(); }
  std::size_t index(int i, int l) const { return static_cast<std::size_t>(i) * n_theta_ + l; }

 private:
  ProblemGeometry geometry_;
  int n_r_;
  int n_theta_;
  std::vector<double> rho_;
  std::vector<double> radial_weight_;
};

/// Complex source samples on a PolarGrid, stored row-major by (i_r, i_theta).
class SourceField {
 public:
  explicit SourceField(PolarGrid grid) : grid_(std::move(grid)), values_(grid_.size()) {}
  SourceField(PolarGrid grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw DomainError("source field: value count does not match grid");
  }

  const PolarGrid& grid() const noexcept { return grid_; }
  const ProblemGeometry& geometry() const noexcept { return grid_.geometry(); }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& values() noexcept { return values_; }
  cplx& at(int i, int l) { return values_[grid_.index(i, l)]; }
  const cplx& at(int i, int l) const { return values_[grid_.index(i, l)]; }

  /// Discrete L2(D0) norm.
  double norm() const {
    double s = 0.0;
    for (int i = 0; i < grid_.n_r(); ++i)
      for (int l = 0; l < grid_.n_theta(); ++l) s += grid_.area_weight(i) * std::norm(at(i, l));
    return std::sqrt(s);
  }

 private:
  PolarGrid grid_;
  std::vector<cplx> values_;
};

inline double relative_l2_error(const SourceField& approx, const SourceField& truth) {
  if (approx.values().size() != truth.values().size()) throw DomainError("relative_l2_error: grid mismatch");
  SourceField diff(truth.grid());
  for (std::size_t n = 0; n < diff.values().size(); ++n) diff.values()[n] = approx.values()[n] - truth.values()[n];
  return diff.norm() / truth.norm();
}

/// Field samples at theta_j = 2 pi j / N_s on the measurement circle.
struct BoundaryData {
  ProblemGeometry geometry;
  std::vector<cplx> values;
  double noise_level = 0.0;

  int size() const noexcept { return static_cast<int>(values.size()); }
  double angle(int j) const { return 2.0 * std::numbers::pi * j / static_cast<double>(values.size()); }
  /// Trapezoid weight R * 2 pi / N_s.
  double weight() const { return geometry.r() * 2.0 * std::numbers::pi / static_cast<double>(values.size()); }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(weight() * s);
  }
  double rms() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s / static_cast<double>(values.size()));
  }
};

/// Sampled mode psi_m on the grid.
inline SourceField sample_mode(const PolarGrid& grid, int m) {
  const auto& g = grid.geometry();
  const double a = a_m(m, g.kappa0());
  if (a == 0.0) throw DegenerateModeError(m);
  const double c = 1.0 / (std::sqrt(std::numbers::pi) * g.r0() * a);
  SourceField s(grid);
  for (int i = 0; i < grid.n_r(); ++i) {
    const double amp = c * bessel_j_signed(m, g.k() * grid.rho(i));
    for (int l = 0; l < grid.n_theta(); ++l) s.at(i, l) = std::polar(amp, m * grid.theta(l));
  }
  return s;
}

/// Linear combination sum_n coeff_n psi_{m_n} sampled on the grid.
inline SourceField sample_modes(const PolarGrid& grid, const std::vector<std::pair<int, cplx>>& terms) {
  SourceField s(grid);
  for (const auto& [m, coeff] : terms) {
    const SourceField mode = sample_mode(grid, m);
    for (std::size_t n = 0; n < s.values().size(); ++n) s.values()[n] += coeff * mode.values()[n];
  }
  return s;
}

/// How the angular part of the area integral is discretised.
enum class AngularRule {
  /// Kernel sampled at the grid nodes: entry sqrt(w_s) H_0(k|x_j - y_il|) sqrt(W_il).
  point,
  /// Product integration: the kernel's angular Fourier coefficients on each
  /// ring are integrated accurately and paired with the trigonometric
  /// interpolant of the source samples. Removes the error from the
  /// near-singular kernel when R is close to R0.
  product,
};

/// Weighted discrete forward operator, N_s x (N_r N_theta).
/// Acts on sqrt(W) s and returns sqrt(w_s) U.
struct ForwardMatrix {
  Eigen::MatrixXcd entries;
  PolarGrid grid;
  int n_s = 0;
  AngularRule rule = AngularRule::product;

  Eigen::VectorXcd weighted_source(const SourceField& s) const {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(grid.size()));
    for (int i = 0; i < grid.n_r(); ++i)
      for (int l = 0; l < grid.n_theta(); ++l)
        v(static_cast<Eigen::Index>(grid.index(i, l))) = std::sqrt(grid.area_weight(i)) * s.at(i, l);
    return v;
  }

  SourceField source_from_weighted(const Eigen::VectorXcd& v) const {
    SourceField s(grid);
    for (int i = 0; i < grid.n_r(); ++i)
      for (int l = 0; l < grid.n_theta(); ++l)
        s.at(i, l) = v(static_cast<Eigen::Index>(grid.index(i, l))) / std::sqrt(grid.area_weight(i));
    return s;
  }

  double boundary_weight() const { return grid.geometry().r() * 2.0 * std::numbers::pi / n_s; }

  BoundaryData apply(const SourceField& s) const {
    const Eigen::VectorXcd u = entries * weighted_source(s);
    BoundaryData b{grid.geometry(), std::vector<cplx>(static_cast<std::size_t>(n_s)), 0.0};
    const double sw = std::sqrt(boundary_weight());
    for (int j = 0; j < n_s; ++j) b.values[j] = u(j) / sw;
    return b;
  }
};

namespace detail {

// Angular Fourier coefficients of the kernel on a ring of radius rho:
//   c_nu = (1/pi) int_0^pi H_0(k d(t)) cos(nu t) dt,  d^2 = (R - rho)^2 + 4 R rho sin^2(t/2),
// for nu = 0..nu_max. Composite 16-point Gauss panels, geometrically graded
// towards t = 0 where the kernel is nearly singular.
inline std::vector<cplx> ring_kernel_coefficients(const ProblemGeometry& g, double rho, int nu_max) {
  const double R = g.r();
  const double k = g.k();
  const double width = std::max((R - rho) / std::sqrt(R * rho), 1e-14);
  const double h_max = 2.0 * std::numbers::pi / (nu_max + k * (R + rho) + 4.0);

  std::vector<std::pair<double, double>> panels;
  double a = 0.0;
  double h = std::min(width, h_max);
  while (a < std::numbers::pi) {
    const double b = std::min(a + h, std::numbers::pi);
    panels.emplace_back(a, b);
    a = b;
    h = std::min(2.0 * h, h_max);
  }

  static const GaussRule unit = gauss_legendre(16, 0.0, 1.0);
  std::vector<cplx> c(static_cast<std::size_t>(nu_max) + 1, cplx{});
  for (const auto& [lo, hi] : panels) {
    for (std::size_t q = 0; q < unit.nodes.size(); ++q) {
      const double t = lo + (hi - lo) * unit.nodes[q];
      const double w = (hi - lo) * unit.weights[q];
      const double s = std::sin(0.5 * t);
      const double d = std::sqrt((R - rho) * (R - rho) + 4.0 * R * rho * s * s);
      const cplx kern = hankel1_0(k * d) * w;
      // cos(nu t) by the Chebyshev recurrence
      const double c1 = std::cos(t);
      double cm = 1.0, cn = c1;
      c[0] += kern;
      for (int nu = 1; nu <= nu_max; ++nu) {
        c[nu] += kern * cn;
        const double next = 2.0 * c1 * cn - cm;
        cm = cn;
        cn = next;
      }
    }
  }
  for (auto& v : c) v /= std::numbers::pi;
  return c;
}

// Band-limited kernel sum_{|nu| <= N/2} c_nu e^{i nu t} (Nyquist term as cosine).
inline cplx band_limited_kernel(const std::vector<cplx>& c, int n_theta, double t) {
  const int half = n_theta / 2;
  const bool even = n_theta % 2 == 0;
  cplx s = c[0];
  for (int nu = 1; nu <= half; ++nu) {
    const double f = (even && nu == half) ? 1.0 : 2.0;
    s += f * c[nu] * std::cos(nu * t);
  }
  return s;
}

}  // namespace detail

/// Assemble the weighted forward matrix. Requires N_r >= 8,
/// N_theta >= 2 ceil(kappa0) + 16 and N_s >= 2 ceil(kappa) + 16.
inline ForwardMatrix assemble_forward(const ProblemGeometry& g, int n_r, int n_theta, int n_s,
                                      AngularRule rule = AngularRule::product) {
  if (n_r < 8) throw DomainError("assemble_forward: N_r must be >= 8");
  if (n_theta < 2 * std::ceil(g.kappa0()) + 16) throw DomainError("assemble_forward: N_theta too small for kappa0");
  if (n_s < 2 * std::ceil(g.kappa()) + 16) throw DomainError("assemble_forward: N_s too small for kappa");

  ForwardMatrix fm{Eigen::MatrixXcd(n_s, static_cast<Eigen::Index>(n_r) * n_theta), PolarGrid(g, n_r, n_theta), n_s,
                   rule};
  const PolarGrid& grid = fm.grid;
  const double sws = std::sqrt(fm.boundary_weight());

  // The kernel on ring i depends only on theta_j - theta_l, which is a
  // multiple of 2 pi / lcm(N_s, N_theta).
  const std::int64_t gcd = std::gcd(n_s, n_theta);
  const std::int64_t period = static_cast<std::int64_t>(n_s) * n_theta / gcd;

  for (int i = 0; i < n_r; ++i) {
    const double rho = grid.rho(i);
    std::vector<cplx> coeffs;
    if (rule == AngularRule::product) coeffs = detail::ring_kernel_coefficients(g, rho, n_theta / 2);

    std::vector<cplx> cache(static_cast<std::size_t>(period));
    std::vector<bool> have(static_cast<std::size_t>(period), false);
    const double sw = std::sqrt(grid.area_weight(i));
    for (int j = 0; j < n_s; ++j) {
      for (int l = 0; l < n_theta; ++l) {
        std::int64_t key = (static_cast<std::int64_t>(j) * n_theta - static_cast<std::int64_t>(l) * n_s) / gcd;
        key = ((key % period) + period) % period;
        if (!have[key]) {
          const double t = 2.0 * std::numbers::pi * static_cast<double>(key) / static_cast<double>(period);
          if (rule == AngularRule::product) {
            cache[key] = detail::band_limited_kernel(coeffs, n_theta, t);
          } else {
            const double R = g.r();
            const double s = std::sin(0.5 * t);
            const double d = std::sqrt((R - rho) * (R - rho) + 4.0 * R * rho * s * s);
            if (d == 0.0) throw DomainError("assemble_forward: measurement point coincides with a source node");
            cache[key] = hankel1_0(g.k() * d);
          }
          have[key] = true;
        }
        fm.entries(j, static_cast<Eigen::Index>(grid.index(i, l))) = sws * cache[key] * sw;
      }
    }
  }
  return fm;
}

/// Singular values of the forward matrix, descending.
inline std::vector<double> matrix_singular_values(const ForwardMatrix& fm) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(fm.entries);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

/// (s, psi_m)_{L2(D0)} for |m| <= M by the grid quadrature, indexed m + M.
/// Modes with A_m = 0 get coefficient 0.
inline std::vector<cplx> project_modes(const SourceField& s, int M) {
  const PolarGrid& grid = s.grid();
  const auto& g = grid.geometry();
  const auto la = log_a_all(M, g.kappa0());
  std::vector<cplx> out(static_cast<std::size_t>(2 * M + 1), cplx{});
  const int nt = grid.n_theta();

  for (int i = 0; i < grid.n_r(); ++i) {
    const auto j = bessel_j_scaled(M, g.k() * grid.rho(i));
    for (int m = -M; m <= M; ++m) {
      const int n = std::abs(m);
      if (!std::isfinite(la[n])) continue;
      // angular DFT of the ring
      cplx acc{};
      for (int l = 0; l < nt; ++l) acc += s.at(i, l) * std::polar(1.0, -m * grid.theta(l));
      double jm = j[n].value();
      if (m < 0 && n % 2 == 1) jm = -jm;
      const double c = jm / (std::sqrt(std::numbers::pi) * g.r0() * std::exp(la[n]));
      out[m + M] += grid.area_weight(i) * c * acc;
    }
  }
  return out;
}

/// U(theta_j) = sum_{|m| <= M} sigma_|m| (s, psi_m) phi_m(theta_j).
inline BoundaryData apply_forward_analytic(const SourceField& s, int M, int n_s) {
  if (M < 0) throw DomainError("apply_forward_analytic: negative mode count");
  if (n_s < 1) throw DomainError("apply_forward_analytic: need at least one boundary sample");
  const auto& g = s.geometry();
  const SpectrumTable spec = build_spectrum(g, std::max(M, 1));
  const auto coeffs = project_modes(s, M);

  BoundaryData b{g, std::vector<cplx>(static_cast<std::size_t>(n_s), cplx{}), 0.0};
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi * g.r());
  int skipped = 0;
  for (int m = -M; m <= M; ++m) {
    if (spec.row(m).a == 0.0) {
      ++skipped;
      continue;
    }
    const cplx w = spec.sigma(m) * coeffs[m + M];
    const double phase = spec.hankel_phase(m);
    for (int j = 0; j < n_s; ++j) b.values[j] += w * std::polar(amp, phase + m * b.angle(j));
  }
  if (skipped > 0) logger().warn("apply_forward_analytic: skipped {} modes with A_m = 0", skipped);
  return b;
}

/// Clean modal data plus complex Gaussian noise whose expected RMS is
/// noise_level times the RMS of the clean samples. Deterministic in seed.
inline BoundaryData synthesize_measurement(const SourceField& s, int M, int n_s, double noise_level,
                                           std::uint64_t seed) {
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
    throw DomainError("synthesize_measurement: noise level must be >= 0");
  BoundaryData b = apply_forward_analytic(s, M, n_s);
  b.noise_level = noise_level;
  if (noise_level == 0.0) return b;
  const double sd = noise_level * b.rms() / std::numbers::sqrt2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : b.values) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += cplx(sd * re, sd * im);
  }
  return b;
}

}  // namespace isp

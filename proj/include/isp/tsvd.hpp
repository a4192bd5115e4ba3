#pragma once

// Truncated SVD inversion on the closed-form singular system, plus a
// reference TSVD on the assembled matrix.

#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/SVD>

#include "isp/bandwidth.hpp"
#include "isp/errors.hpp"
#include "isp/forward_model.hpp"
#include "isp/singular_system.hpp"

namespace isp {

/// c_m = (U, phi_m) on the measurement circle, m = -M..M.
class ModalCoefficients {
 public:
  ModalCoefficients(ProblemGeometry g, int M) : geometry_(g), max_(M), c_(static_cast<std::size_t>(2 * M + 1)) {}

  const ProblemGeometry& geometry() const noexcept { return geometry_; }
  int max_order() const noexcept { return max_; }
  cplx& operator[](int m) { return c_.at(static_cast<std::size_t>(m + max_)); }
  const cplx& operator[](int m) const { return c_.at(static_cast<std::size_t>(m + max_)); }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return s;
  }

 private:
  ProblemGeometry geometry_;
  int max_;
  std::vector<cplx> c_;
};

inline ModalCoefficients modal_decompose(const BoundaryData& u, int M) {
  if (M < 0) throw DomainError("modal_decompose: negative mode count");
  if (u.size() < 2 * M + 1)
    throw DomainError("modal_decompose: " + std::to_string(u.size()) + " samples alias modes up to " +
                      std::to_string(M) + " (need N_s >= 2M+1)");
  const auto& g = u.geometry;
  ModalCoefficients c(g, M);
  const double w = u.weight();
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi * g.r());
  for (int m = -M; m <= M; ++m) {
    const int n = std::abs(m);
    double phase = hankel_phase(n, g.kappa());
    if (m < 0 && n % 2 == 1) phase += std::numbers::pi;
    cplx acc{};
    for (int j = 0; j < u.size(); ++j) acc += u.values[j] * std::polar(amp, -(phase + m * u.angle(j)));
    c[m] = w * acc;
  }
  return c;
}

enum class TruncationPolicy { bandwidth, lower, upper, manual };

inline std::string to_string(TruncationPolicy p) {
  switch (p) {
    case TruncationPolicy::bandwidth: return "B";
    case TruncationPolicy::lower: return "B-";
    case TruncationPolicy::upper: return "B+";
    case TruncationPolicy::manual: return "N";
  }
  return "?";
}

struct Reconstruction {
  SourceField source;
  int truncation = 0;
  /// Relative misfit between F s_hat and the data over the retained modes.
  double residual = 0.0;
  TruncationPolicy policy = TruncationPolicy::manual;
};

/// s_hat = sum_{|m| <= N} c_m / sigma_|m| psi_m on the given grid.
inline Reconstruction tsvd_reconstruct(const ModalCoefficients& c, int N, const PolarGrid& grid,
                                       TruncationPolicy policy = TruncationPolicy::manual) {
  if (N < 0) throw DomainError("tsvd_reconstruct: negative truncation");
  if (N > c.max_order())
    throw DomainError("tsvd_reconstruct: N = " + std::to_string(N) + " exceeds decomposed modes (" +
                      std::to_string(c.max_order()) + ")");
  if (!(grid.geometry() == c.geometry())) throw DomainError("tsvd_reconstruct: grid and data geometries differ");
  const auto& g = c.geometry();
  const SpectrumTable spec = build_spectrum(g, std::max(N, 1));
  for (int m = 0; m <= N; ++m) {
    const auto& r = spec.row(m);
    if (!(r.sigma > 0.0) || !std::isfinite(1.0 / r.sigma))
      throw NumericError("tsvd_reconstruct: sigma underflows at mode " + std::to_string(m));
  }

  // Per-ring radial factors J_m(k rho) / (sqrt(pi) R0 A_m).
  std::vector<std::vector<double>> radial(static_cast<std::size_t>(grid.n_r()));
  for (int i = 0; i < grid.n_r(); ++i) {
    const auto j = bessel_j_scaled(N, g.k() * grid.rho(i));
    radial[i].resize(static_cast<std::size_t>(N) + 1);
    for (int m = 0; m <= N; ++m)
      radial[i][m] = j[m].value() / (std::sqrt(std::numbers::pi) * g.r0() * spec.row(m).a);
  }

  Reconstruction out{SourceField(grid), N, 0.0, policy};
  for (int m = -N; m <= N; ++m) {
    const int n = std::abs(m);
    const cplx w = c[m] / spec.sigma(m);
    const double sign = (m < 0 && n % 2 == 1) ? -1.0 : 1.0;
    for (int i = 0; i < grid.n_r(); ++i) {
      const cplx wr = w * (sign * radial[i][n]);
      for (int l = 0; l < grid.n_theta(); ++l) out.source.at(i, l) += wr * std::polar(1.0, m * grid.theta(l));
    }
  }

  // Misfit of the gridded reconstruction against c on retained modes.
  const auto proj = project_modes(out.source, N);
  double num = 0.0, den = 0.0;
  for (int m = -N; m <= N; ++m) {
    num += std::norm(spec.sigma(m) * proj[m + N] - c[m]);
    den += std::norm(c[m]);
  }
  out.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

/// Truncation index for a policy; manual uses n.
inline int pick_truncation(const ProblemGeometry& g, TruncationPolicy policy, int n = -1) {
  switch (policy) {
    case TruncationPolicy::bandwidth: return bandwidth(build_spectrum(g));
    case TruncationPolicy::lower: return bound_lower(g.kappa0());
    case TruncationPolicy::upper: return bound_upper(g.kappa0());
    case TruncationPolicy::manual:
      if (n < 0) throw DomainError("pick_truncation: manual N must be >= 0");
      return n;
  }
  throw DomainError("pick_truncation: unknown policy");
}

/// TSVD through the numerical SVD of the assembled matrix, keeping the
/// leading `rank` singular triplets.
inline SourceField matrix_tsvd(const ForwardMatrix& fm, const BoundaryData& u, int rank) {
  if (u.size() != fm.n_s) throw DomainError("matrix_tsvd: data size does not match the matrix");
  if (rank < 0) throw DomainError("matrix_tsvd: negative rank");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(fm.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r = std::min<Eigen::Index>(rank, svd.singularValues().size());
  Eigen::VectorXcd b(fm.n_s);
  const double sw = std::sqrt(fm.boundary_weight());
  for (int j = 0; j < fm.n_s; ++j) b(j) = sw * u.values[j];
  Eigen::VectorXcd coeff = svd.matrixU().leftCols(r).adjoint() * b;
  for (Eigen::Index i = 0; i < r; ++i) coeff(i) /= svd.singularValues()(i);
  return fm.source_from_weighted(svd.matrixV().leftCols(r) * coeff);
}

}  // namespace isp

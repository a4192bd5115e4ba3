// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "isp/isp.hpp"

using namespace isp;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string f(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("exception: ") + e.what());
  }
}

const std::vector<SweepRecord>& sweep_records(double* seconds = nullptr) {
  static double elapsed = 0.0;
  static const auto records = [] {
    Timer t;
    auto r = run_sweep();
    elapsed = t.seconds();
    return r;
  }();
  if (seconds) *seconds = elapsed;
  return records;
}

}  // namespace

int main() {
  guarded(1, "bandwidth golden value", [] {
    Timer t;
    const int b = bandwidth(build_spectrum(ProblemGeometry::from_size_parameters(10 * pi, 10 * pi)));
    const double s = t.seconds();
    verdict(1, "bandwidth golden value", b == 27 && s < 1.0, f("B=%d at kappa=kappa0=10pi (%.3f s)", b, s));
  });

  guarded(2, "radius independence", [] {
    Timer t;
    const auto far = build_spectrum(ProblemGeometry::from_size_parameters(10 * pi, 100 * pi));
    const int b = bandwidth(far);
    const double s = t.seconds();
    const auto near = build_spectrum(ProblemGeometry::from_size_parameters(10 * pi, 10 * pi));
    double peak_far = -INFINITY, peak_near = -INFINITY;
    for (const auto& r : far.rows()) peak_far = std::max(peak_far, r.log_sigma);
    for (const auto& r : near.rows()) peak_near = std::max(peak_near, r.log_sigma);
    verdict(2, "radius independence", b == 27 && peak_far < peak_near && s < 2.0,
            f("B=%d at kappa=100pi, kappa0=10pi (expected 27); peak log sigma %.4f < %.4f; %.3f s", b, peak_far,
              peak_near, s));
  });

  guarded(3, "bound sandwich", [] {
    int lower = 0, upper = 0;
    std::string where;
    for (const auto& r : sweep_records()) {
      if (r.b_minus > r.b) ++lower;
      if (r.b > r.b_plus) {
        ++upper;
        where += f(" kappa=%.6g", r.kappa);
      }
    }
    verdict(3, "bound sandwich", lower == 0 && upper == 0,
            f("lower violations %d, upper violations %d over %zu points", lower, upper, sweep_records().size()) +
                where);
  });

  guarded(4, "sweep statistics", [] {
    double secs = 0.0;
    const auto& rec = sweep_records(&secs);
    double em = 0, ep = 0;
    int mm = 0, mp = 0;
    for (const auto& r : rec) {
      em += r.eps_minus;
      ep += r.eps_plus;
      mm = std::max(mm, std::abs(r.eps_minus));
      mp = std::max(mp, std::abs(r.eps_plus));
    }
    em /= static_cast<double>(rec.size());
    ep /= static_cast<double>(rec.size());
    const double step = (100 * pi - 2) / 299;
    const double settle = settles_below(rec, 0.05, [](const SweepRecord& r) { return r.relerr_minus; });
    const bool ok = std::abs(em + 1.68) <= 0.15 && std::abs(ep - 3.02) <= 0.15 && std::abs(mm - 3) <= 1 &&
                    std::abs(mp - 4) <= 1 && std::abs(settle - 24.75) <= step && secs < 60.0;
    verdict(4, "sweep statistics", ok,
            f("mean eps- %.4f, mean eps+ %.4f, max|eps-| %d, max|eps+| %d, relerr- < 5%% from kappa %.4f; %.2f s", em,
              ep, mm, mp, settle, secs));
  });

  guarded(5, "linear regression", [] {
    struct Row {
      FitTarget t;
      double slope, intercept, mae;
    };
    const Row ref[] = {{FitTarget::b, 0.9793, -3.9569, 0.4813},
                       {FitTarget::b_minus, 0.9736, -4.7394, 0.5715},
                       {FitTarget::b_plus, 0.9861, -2.0083, 0.4052}};
    bool ok = true;
    std::string detail;
    for (const auto& r : ref) {
      const auto fit = fit_linear(sweep_records(), r.t);
      ok = ok && std::abs(fit.slope - r.slope) <= 0.005 && std::abs(fit.intercept - r.intercept) <= 0.4 &&
           std::abs(fit.mean_abs_error - r.mae) <= 0.15 && fit.std_dev <= 5e-3;
      detail += f("%s %.5f k %+.4f (mae %.4f, sd %.2e); ", to_string(r.t).c_str(), fit.slope, fit.intercept,
                  fit.mean_abs_error, fit.std_dev);
    }
    verdict(5, "linear regression", ok, detail);
  });

  guarded(6, "zero-bandwidth threshold", [] {
    const double t = zero_bandwidth_threshold();
    verdict(6, "zero-bandwidth threshold", t > 1.7 && t < 2.7, f("first kappa with B >= 1: %.3f", t));
  });

  guarded(7, "discrete vs analytic singular values", [] {
    Timer t;
    const auto g = ProblemGeometry::from_size_parameters(4.0, 4.0);
    const auto sv = matrix_singular_values(assemble_forward(g, 64, 128, 128));
    const auto spec = build_spectrum(g, 20);
    std::vector<double> an;
    for (int m = 0; m <= 20; ++m) {
      an.push_back(spec.sigma(m));
      if (m > 0) an.push_back(spec.sigma(m));
    }
    std::sort(an.rbegin(), an.rend());
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) worst = std::max(worst, std::abs(sv[i] - an[i]) / an[i]);
    const double s = t.seconds();
    verdict(7, "discrete vs analytic singular values", worst <= 1e-3 && s < 30.0,
            f("max relative error %.2e over 12 values (%.2f s)", worst, s));
  });

  guarded(8, "singular system properties", [] {
    const auto g = ProblemGeometry::from_size_parameters(10 * pi, 10 * pi);
    // psi / phi normalisation and orthogonality
    const int nr = 80, nt = 128;
    const auto rule = gauss_legendre(nr, 0.0, g.r0());
    const int modes[] = {0, 1, -1, 6, 19, -27, 33};
    double psi_err = 0.0, phi_err = 0.0;
    for (int a : modes)
      for (int b : modes) {
        std::complex<double> ip{}, jp{};
        for (int i = 0; i < nr; ++i)
          for (int l = 0; l < nt; ++l) {
            const double th = 2 * pi * l / nt;
            ip += rule.weights[i] * rule.nodes[i] * (2 * pi / nt) * psi_eval(a, g, rule.nodes[i], th) *
                  std::conj(psi_eval(b, g, rule.nodes[i], th));
          }
        for (int l = 0; l < nt; ++l) {
          const double th = 2 * pi * l / nt;
          jp += g.r() * (2 * pi / nt) * phi_eval(a, g, th) * std::conj(phi_eval(b, g, th));
        }
        const std::complex<double> id(a == b ? 1.0 : 0.0);
        psi_err = std::max(psi_err, std::abs(ip - id));
        phi_err = std::max(phi_err, std::abs(jp - id));
      }
    // A identities
    double dual = 0.0, diff = 0.0;
    for (double k0 : {0.8, 7.0, 10 * pi, 90.0}) {
      const auto j = bessel_j_scaled(62, k0);
      for (int m = 1; m <= 60; ++m) {
        const double jm = j[m].value(), jp1 = j[m + 1].value(), jm1 = j[m - 1].value();
        const double a2 = std::pow(a_m(m, k0), 2), a2n = std::pow(a_m(m + 1, k0), 2);
        const double second = jm * jm + jp1 * jp1 - 2.0 * m / k0 * jm * jp1;
        const double scale = jm * jm + jp1 * jp1 + std::abs(jm1 * jp1);
        if (scale < 1e-250) continue;
        dual = std::max(dual, std::abs(a2 - second) / scale);
        diff = std::max(diff, std::abs(a2 - a2n - 2.0 / k0 * jm * jp1) / (a2 + a2n));
      }
    }
    // |H_m|^2 monotone in m
    bool monotone = true;
    for (double x : {0.5, 10 * pi, 300.0}) {
      const auto l = log_hankel_abs2_all(400, x);
      for (int m = 0; m < 400; ++m) monotone = monotone && l[m] < l[m + 1];
    }
    // Nicholson agreement at 20 pairs
    double nich = 0.0;
    const int nm[] = {0, 4, 25, 80, 160};
    const double nx[] = {0.7, 9.0, 10 * pi, 150.0};
    for (int m : nm)
      for (double x : nx) nich = std::max(nich, std::abs(log_hankel_abs2(m, x) - nicholson_log_abs2(m, x)));
    // zero spacing in the order at 20 arguments
    double spacing = INFINITY;
    for (int i = 0; i < 20; ++i) {
      const double x = 3.0 + i * 17.0 / 19.0;
      const auto z = order_zeros_j(x, x + 2.0);
      for (std::size_t n = 1; n < z.size(); ++n) spacing = std::min(spacing, z[n] - z[n - 1]);
    }
    const double eps = 1e-13;
    const bool ok = psi_err <= 1e-8 && phi_err <= 1e-8 && dual <= eps && diff <= eps && monotone && nich <= 1e-6 &&
                    spacing > 1.0;
    verdict(8, "singular system properties", ok,
            f("psi %.1e, phi %.1e, dual form %.1e, difference %.1e, |H|^2 monotone %s, Nicholson %.1e, "
              "min zero spacing %.4f",
              psi_err, phi_err, dual, diff, monotone ? "yes" : "no", nich, spacing));
  });

  guarded(9, "asymptotic regimes", [] {
    double plateau = 0.0;
    for (const auto& r : asymptotic_checks({ProblemGeometry::from_size_parameters(200 * pi, 200 * pi)}, 0, 5))
      plateau = std::max(plateau, r.plateau_deviation);
    const auto decay = asymptotic_checks({ProblemGeometry::from_size_parameters(0.5, 1.0)}, 8, 16);
    double worst = 0.0;
    bool shrinking = true;
    for (std::size_t i = 0; i < decay.size(); ++i) {
      worst = std::max(worst, decay[i].decay_deviation);
      if (i > 0) shrinking = shrinking && decay[i].decay_deviation < decay[i - 1].decay_deviation;
    }
    verdict(9, "asymptotic regimes", plateau <= 0.05 && worst <= 0.25 && shrinking,
            f("plateau deviation %.2e; decay deviation %.4f -> %.4f (%s)", plateau, decay.front().decay_deviation,
              decay.back().decay_deviation, shrinking ? "decreasing" : "not decreasing"));
  });

  guarded(10, "TSVD behaviour", [] {
    const auto g = ProblemGeometry::from_size_parameters(10 * pi, 10 * pi);
    const PolarGrid grid(g, 64, 128);
    const int M = 60, ns = 128;
    const auto s = sample_modes(grid, {{2, {1.0, 0.0}}, {-9, {0.5, 0.0}}});
    const auto clean = modal_decompose(synthesize_measurement(s, M, ns, 0.0, 1), M);
    double rec = 0.0;
    for (int n : {9, 27, 40}) rec = std::max(rec, relative_l2_error(tsvd_reconstruct(clean, n, grid).source, s));
    double proj = 0.0;
    for (int n : {0, 5, 27}) {
      const auto back = modal_decompose(apply_forward_analytic(tsvd_reconstruct(clean, n, grid).source, M, ns), M);
      for (int m = -M; m <= M; ++m)
        proj = std::max(proj, std::abs(back[m] - (std::abs(m) <= n ? clean[m] : std::complex<double>(0.0))));
    }
    const int lo = pick_truncation(g, TruncationPolicy::lower);
    const int hi = pick_truncation(g, TruncationPolicy::upper) + 10;
    const auto noisy = modal_decompose(synthesize_measurement(s, M, ns, 1e-2, 2024), M);
    const double e_lo = relative_l2_error(tsvd_reconstruct(noisy, lo, grid).source, s);
    const double e_hi = relative_l2_error(tsvd_reconstruct(noisy, hi, grid).source, s);
    verdict(10, "TSVD behaviour", rec <= 1e-6 && proj <= 1e-8 && e_hi >= 10 * e_lo,
            f("clean error %.1e, projection %.1e, noisy error N=%d: %.3e vs N=%d: %.3e (ratio %.2f, need >= 10)", rec,
              proj, hi, e_hi, lo, e_lo, e_hi / e_lo));
  });

  guarded(11, "closed-form bound estimates", [] {
    int worst = 0;
    for (const auto& r : sweep_records())
      if (r.kappa0 >= 10) worst = std::max(worst, std::abs(r.b_tilde_minus - r.b_minus));
    const double settle = settles_below(sweep_records(), 0.05,
                                        [](const SweepRecord& r) { return detail::relative_miss(r.b_tilde_plus, r.b); });
    verdict(11, "closed-form bound estimates", worst <= 1 && settle >= 150.0 && settle <= 200.0,
            f("max |B~- - B-| = %d for kappa0 >= 10; ceil(kappa0) within 5%% of B from kappa %.2f", worst, settle));
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

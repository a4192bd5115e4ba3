#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isp/forward_model.hpp"

using namespace isp;

namespace {
constexpr double pi = std::numbers::pi;
const ProblemGeometry four = ProblemGeometry::from_size_parameters(4.0, 4.0);

// sigma_0, sigma_1, sigma_1, sigma_2, sigma_2, ... sorted descending
std::vector<double> analytic_sorted(const ProblemGeometry& g, int mmax) {
  const auto t = build_spectrum(g, mmax);
  std::vector<double> v;
  for (int m = 0; m <= mmax; ++m) {
    v.push_back(t.sigma(m));
    if (m > 0) v.push_back(t.sigma(m));
  }
  std::sort(v.rbegin(), v.rend());
  return v;
}

double worst_leading_error(const ForwardMatrix& fm, int count) {
  const auto sv = matrix_singular_values(fm);
  const auto an = analytic_sorted(fm.grid.geometry(), 40);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) worst = std::max(worst, std::abs(sv[i] - an[i]) / an[i]);
  return worst;
}

double boundary_rel_diff(const BoundaryData& a, const BoundaryData& b) {
  double num = 0, den = 0;
  for (int j = 0; j < a.size(); ++j) {
    num += std::norm(a.values[j] - b.values[j]);
    den += std::norm(b.values[j]);
  }
  return std::sqrt(num / den);
}
}  // namespace

TEST(PolarGrid, WeightsCoverTheDisk) {
  const PolarGrid grid(ProblemGeometry(2.0, 1.7, 3.0), 24, 64);
  double area = 0.0;
  for (int i = 0; i < grid.n_r(); ++i) {
    EXPECT_GT(grid.area_weight(i), 0.0);
    EXPECT_GT(grid.rho(i), 0.0);
    EXPECT_LT(grid.rho(i), 1.7);
    area += grid.area_weight(i) * grid.n_theta();
  }
  EXPECT_NEAR(area, pi * 1.7 * 1.7, 1e-12 * pi * 1.7 * 1.7);
}

TEST(AssembleForward, Preconditions) {
  EXPECT_THROW(assemble_forward(four, 7, 64, 64), DomainError);
  EXPECT_THROW(assemble_forward(four, 16, 2 * 4 + 15, 64), DomainError);
  EXPECT_THROW(assemble_forward(four, 16, 64, 2 * 4 + 15), DomainError);
  EXPECT_NO_THROW(assemble_forward(four, 8, 24, 24));
}

TEST(AssembleForward, SingularValuesMatchClosedForm) {
  const auto fm = assemble_forward(four, 64, 128, 128);
  EXPECT_TRUE(fm.entries.allFinite());
  EXPECT_LE(worst_leading_error(fm, 12), 1e-3);
}

TEST(AssembleForward, MultiplicityPairs) {
  const auto sv = matrix_singular_values(assemble_forward(four, 64, 128, 128));
  const auto t = build_spectrum(four, 12);
  // identify the singleton sigma_0 and check the others come in pairs
  std::vector<double> rest;
  bool singleton_found = false;
  for (double s : std::vector<double>(sv.begin(), sv.begin() + 13)) {
    if (!singleton_found && std::abs(s - t.sigma(0)) < 1e-6 * s) {
      singleton_found = true;
      continue;
    }
    rest.push_back(s);
  }
  ASSERT_TRUE(singleton_found);
  for (std::size_t i = 0; i + 1 < rest.size(); i += 2) EXPECT_LE(std::abs(rest[i] - rest[i + 1]) / rest[i], 1e-6);
}

TEST(AssembleForward, PointRuleConvergesInAngle) {
  const double e1 = worst_leading_error(assemble_forward(four, 16, 128, 128, AngularRule::point), 12);
  const double e2 = worst_leading_error(assemble_forward(four, 16, 256, 128, AngularRule::point), 12);
  const double e3 = worst_leading_error(assemble_forward(four, 16, 512, 128, AngularRule::point), 12);
  EXPECT_LE(e2, e1 / 4);
  EXPECT_LE(e3, e2 / 4);
}

TEST(AssembleForward, RadialRefinement) {
  const double e8 = worst_leading_error(assemble_forward(four, 8, 128, 128), 12);
  const double e16 = worst_leading_error(assemble_forward(four, 16, 128, 128), 12);
  EXPECT_LE(e16, std::max(e8 / 4, 1e-13));
  EXPECT_LE(e16, 1e-10);
}

TEST(AssembleForward, ZeroSourceGivesZeroData) {
  const auto fm = assemble_forward(four, 8, 32, 32);
  const SourceField zero(fm.grid);
  for (const auto& v : fm.apply(zero).values) EXPECT_EQ(v, cplx(0.0));
}

TEST(AnalyticForward, SingularTriple) {
  const PolarGrid grid(four, 48, 64);
  const auto t = build_spectrum(four, 20);
  for (int m : {0, 5, -5, 9}) {
    const auto u = apply_forward_analytic(sample_mode(grid, m), 20, 64);
    for (int j = 0; j < u.size(); ++j) {
      const cplx expect = t.sigma(m) * phi_eval(m, four, u.angle(j));
      EXPECT_LE(std::abs(u.values[j] - expect), 1e-8 * std::abs(expect));
    }
  }
}

TEST(AnalyticForward, AgreesWithMatrix) {
  const auto fm = assemble_forward(four, 64, 128, 128);
  const auto s = sample_modes(fm.grid, {{2, {1.0, 0.0}}, {-7, {0.0, 0.5}}, {0, {0.3, -0.2}}});
  EXPECT_LE(boundary_rel_diff(fm.apply(s), apply_forward_analytic(s, 40, 128)), 1e-4);
  // discrete norm consistency
  EXPECT_NEAR(fm.apply(s).l2_norm(), apply_forward_analytic(s, 40, 128).l2_norm(),
              1e-8 * apply_forward_analytic(s, 40, 128).l2_norm());
}

TEST(AnalyticForward, NullSpaceDirection) {
  // s = (Laplacian + k^2) w, w = (1 - rho^2/R0^2)^5 e^{2 i theta} rho^2
  const auto& g = four;
  const double k = g.k(), r0 = g.r0();
  auto make = [&](int nr) {
    PolarGrid grid(g, nr, 32);
    SourceField s(grid);
    const int p = 5;
    for (int i = 0; i < nr; ++i) {
      const double r = grid.rho(i);
      const double u = 1.0 - r * r / (r0 * r0);
      // f(r) = r^2 u^p; Laplacian of f e^{2i theta} = f'' + f'/r - 4 f / r^2
      const double du = -2.0 * r / (r0 * r0);
      const double f = r * r * std::pow(u, p);
      const double f1 = 2 * r * std::pow(u, p) + r * r * p * std::pow(u, p - 1) * du;
      const double f2 = 2 * std::pow(u, p) + 4 * r * p * std::pow(u, p - 1) * du +
                        r * r * p * (p - 1) * std::pow(u, p - 2) * du * du +
                        r * r * p * std::pow(u, p - 1) * (-2.0 / (r0 * r0));
      const double lap = f2 + f1 / r - 4.0 * f / (r * r);
      for (int l = 0; l < 32; ++l) s.at(i, l) = (lap + k * k * f) * std::polar(1.0, 2 * grid.theta(l));
    }
    return s;
  };
  const double top = build_spectrum(g, 1).sigma(0);
  std::vector<double> ratio;
  for (int nr : {6, 10, 20}) {
    const auto s = make(nr);
    ratio.push_back(apply_forward_analytic(s, 20, 64).l2_norm() / (top * s.norm()));
  }
  EXPECT_LT(ratio[1], ratio[0]);
  EXPECT_LE(ratio[2], std::max(ratio[1], 1e-12));
  EXPECT_LT(ratio[2], 1e-10);
}

TEST(Synthesis, NoiseFreeIsClean) {
  const PolarGrid grid(four, 16, 32);
  const auto s = sample_mode(grid, 3);
  const auto a = synthesize_measurement(s, 10, 64, 0.0, 7);
  const auto b = apply_forward_analytic(s, 10, 64);
  EXPECT_EQ(a.values, b.values);
}

TEST(Synthesis, NoiseLevelIsRelativeRms) {
  const PolarGrid grid(four, 16, 32);
  const auto s = sample_modes(grid, {{1, {1, 0}}, {-2, {0, 1}}});
  const auto clean = apply_forward_analytic(s, 10, 4096);
  const auto noisy = synthesize_measurement(s, 10, 4096, 0.05, 123);
  double e = 0.0;
  for (int j = 0; j < 4096; ++j) e += std::norm(noisy.values[j] - clean.values[j]);
  const double ratio = std::sqrt(e / 4096) / clean.rms();
  EXPECT_NEAR(ratio, 0.05, 0.05 * 0.05);
  EXPECT_EQ(noisy.noise_level, 0.05);
}

TEST(Synthesis, SeedDeterminism) {
  const PolarGrid grid(four, 16, 32);
  const auto s = sample_mode(grid, 1);
  EXPECT_EQ(synthesize_measurement(s, 8, 64, 0.1, 99).values, synthesize_measurement(s, 8, 64, 0.1, 99).values);
  EXPECT_NE(synthesize_measurement(s, 8, 64, 0.1, 99).values, synthesize_measurement(s, 8, 64, 0.1, 98).values);
  EXPECT_THROW(synthesize_measurement(s, 8, 64, -0.1, 1), DomainError);
}

TEST(Synthesis, DegenerateModeRejected) {
  const PolarGrid grid(ProblemGeometry::from_size_parameters(0.01, 1.0), 8, 16);
  EXPECT_THROW(sample_mode(grid, 400), DegenerateModeError);
}

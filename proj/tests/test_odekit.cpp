#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "minl2/odekit.hpp"

using namespace minl2;

TEST(Ode, ConstantWeightClosedForms) {
  const OdeSolution sol = solve_gz(WeightFunction::constant());
  EXPECT_NEAR(sol.u(std::log(2.0)), std::log(2.0), 1e-10);
  EXPECT_NEAR(sol.s(1.0), 0.581977, 1e-6);
  for (double t : {0.2, 1.0, 3.0, 8.0}) {
    const double e = std::exp(-t);
    EXPECT_NEAR(sol.u(t), -std::log(1.0 - e), 1e-12);
    EXPECT_NEAR(sol.s(t), (t - 1.0 + e) / (1.0 - e), 1e-12);
    // Derivatives of the closed forms.
    const auto jet = sol.at(t);
    EXPECT_NEAR(jet.du, -e / (1.0 - e), 1e-11);
    EXPECT_NEAR(jet.d2u, e / ((1.0 - e) * (1.0 - e)), 1e-10);
  }
  EXPECT_NEAR(sol.u_limit(), 0.0, 1e-14);
}

TEST(Ode, ExpRateClosedForms) {
  const OdeSolution sol = solve_gz(WeightFunction::exp_rate(0.5));
  for (double t : {0.3, 2.0, 6.0}) {
    const double A = 2.0 * (1.0 - std::exp(-t / 2.0));
    const double Q = 2.0 * t - 4.0 * (1.0 - std::exp(-t / 2.0));
    EXPECT_NEAR(sol.u(t), -std::log(A), 1e-12);
    EXPECT_NEAR(sol.s(t), Q / A, 1e-11);
  }
  EXPECT_NEAR(sol.u_limit(), -std::log(2.0), 1e-12);
}

TEST(Ode, ResidualsBelowTolerance) {
  const std::vector<double> grid = linear_grid(0.1, 10.0, 100);
  for (const auto& c : {WeightFunction::constant(), WeightFunction::exp_rate(0.5), WeightFunction::rational(1.0)}) {
    const GzResidualReport rep = verify_gz_residuals(solve_gz(c), grid);
    EXPECT_EQ(rep.rows.size(), grid.size());
    EXPECT_LT(rep.max_res1, 1e-8) << c.describe();
    EXPECT_LT(rep.max_res2, 1e-8) << c.describe();
    EXPECT_GT(rep.min_positivity, 0.0) << c.describe();
    EXPECT_GE(rep.min_s, 0.0) << c.describe();
  }
}

TEST(Ode, GuardAtT) {
  const OdeSolution sol = solve_gz(WeightFunction::constant());
  EXPECT_THROW(sol.at(0.0), SingularityError);
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const GzResidualReport rep = verify_gz_residuals(sol, grid);
  EXPECT_EQ(rep.rows.size(), 2u);
  ASSERT_EQ(rep.skipped.size(), 1u);
  EXPECT_EQ(rep.skipped.front(), 0.0);
  EXPECT_GT(sol.left_margin(), 0.0);
}

TEST(Cutoff, HandComputedValues) {
  const CutoffProfile p = make_cutoff(0.0, 1.0);
  EXPECT_DOUBLE_EQ(p.b(-0.5), 0.5);
  EXPECT_DOUBLE_EQ(p.v(-0.5), -0.375);
  EXPECT_DOUBLE_EQ(p.b(0.3), 1.0);
  EXPECT_DOUBLE_EQ(p.v(0.3), 0.3);
  EXPECT_DOUBLE_EQ(p.b(-2.0), 0.0);
  EXPECT_DOUBLE_EQ(p.v(-2.0), p.v(-1.0));
  EXPECT_THROW(make_cutoff(0.0, 0.0), ParameterError);
}

TEST(Cutoff, SandwichInequalities) {
  for (const auto& [t0, B] : {std::pair{0.0, 1.0}, {1.0, 0.5}, {2.5, 0.25}}) {
    const CutoffProfile p = make_cutoff(t0, B);
    for (double t = -t0 - B - 2.0; t <= 2.0; t += 1e-3) {
      const double b = p.b(t);
      EXPECT_LE(t > -t0 ? 1.0 : 0.0, b);
      EXPECT_LE(b, t > -t0 - B ? 1.0 : 0.0);
      const double v = p.v(t);
      EXPECT_LE(std::max(t, -t0 - B), v + 1e-15);
      EXPECT_LE(v, std::max(t, -t0) + 1e-15);
    }
  }
}

TEST(Mollifier, UnitMassEvenCompactSupport) {
  for (double eps : {1.0, 0.3, 0.01}) {
    const Mollifier rho(eps);
    EXPECT_NEAR(rho.cdf(eps), 1.0, 1e-10);
    EXPECT_EQ(rho(eps), 0.0);
    EXPECT_EQ(rho(-1.5 * eps), 0.0);
    EXPECT_EQ(rho.cdf(-eps), 0.0);
    for (double x : {0.1, 0.5, 0.9}) EXPECT_EQ(rho(x * eps), rho(-x * eps));
    // Independent mass check by a plain midpoint sum.
    double sum = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) sum += rho(-eps + (i + 0.5) * 2.0 * eps / N);
    EXPECT_NEAR(sum * 2.0 * eps / N, 1.0, 1e-9);
  }
}

TEST(SmoothedCutoff, PropertiesOnDenseGrid) {
  for (const auto& [t0, B, eps] : {std::tuple{0.0, 1.0, 0.1}, {1.0, 0.5, 0.05}, {2.0, 0.25, 0.01}}) {
    const SmoothedCutoff v = make_smoothed_cutoff(t0, B, eps);
    for (double t = -t0 - B - 1.0; t <= 1.0; t += 2e-4) {
      if (t >= -t0 - eps) EXPECT_NEAR(v.v(t), t, 1e-9) << t;
      const double d2 = v.d2v(t);
      const bool inside = t > -t0 - B + eps && t < -t0 - eps;
      EXPECT_GE(d2, -1e-9);
      EXPECT_LE(d2, (inside ? 2.0 / B : 0.0) + 1e-9) << t;
      const double d1 = v.dv(t);
      EXPECT_GE(d1, -1e-9);
      EXPECT_LE(d1, 1.0 + 1e-9);
    }
    const double below = -t0 - B + eps;
    EXPECT_NEAR(v.v(below - 0.5), v.v(below - 0.1), 1e-12);
  }
}

TEST(SmoothedCutoff, DerivativesConsistent) {
  const SmoothedCutoff v = make_smoothed_cutoff(1.0, 1.0, 0.1);
  const double h = 1e-5;
  for (double t = -2.3; t < 0.5; t += 0.037) {
    EXPECT_NEAR((v.v(t + h) - v.v(t - h)) / (2 * h), v.dv(t), 1e-8);
    EXPECT_NEAR((v.dv(t + h) - v.dv(t - h)) / (2 * h), v.d2v(t), 1e-5);
  }
}

TEST(SmoothedCutoff, ConvergesToCutoff) {
  const double t0 = 1.0, B = 1.0;
  const CutoffProfile p = make_cutoff(t0, B);
  double prev = 1.0;
  for (double eps : {0.1, 0.01, 0.001}) {
    const SmoothedCutoff v = make_smoothed_cutoff(t0, B, eps);
    double err = 0.0;
    for (double t : {-1.9, -1.5, -1.2, -0.5, 0.3}) err = std::max(err, std::abs(v.dv(t) - p.b(t)));
    EXPECT_LE(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(SmoothedCutoff, RejectsLargeEps) {
  EXPECT_THROW(make_smoothed_cutoff(0.0, 1.0, 0.125), ParameterError);
  EXPECT_THROW(make_smoothed_cutoff(0.0, 1.0, 0.0), ParameterError);
  EXPECT_THROW(make_smoothed_cutoff(0.0, -1.0, 0.01), ParameterError);
}

TEST(MaxSmoother, ExactRegions) {
  const MaxSmoother M = make_max_smoother(0.5);
  EXPECT_EQ(M(3.0, 2.0), 3.0);
  EXPECT_EQ(M(2.0, 3.0), 3.0);
  EXPECT_EQ(M(1.0, 0.0), 1.0);
}

// M_1(0, 0) = E|s - t| / 2 for s, t independent with density rho; oracle by a
// 2-D Gauss-Legendre rule split along the diagonal.
TEST(MaxSmoother, OriginValueOracle) {
  const Bump& bump = Bump::instance();
  const auto& rule = gauss_legendre(64);
  const auto map = [&](double a, double b, std::size_t i) { return 0.5 * (b - a) * rule.nodes[i] + 0.5 * (a + b); };
  double sum = 0.0;
  for (int pa = 0; pa < 16; ++pa) {
    const double a = -1.0 + pa / 8.0, b = a + 1.0 / 8.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double s = map(a, b, i);
      const double ws = 0.5 * (b - a) * rule.weights[i] * bump.density(s);
      double inner = 0.0;
      for (int side = 0; side < 2; ++side) {
        const double lo = side == 0 ? -1.0 : s, hi = side == 0 ? s : 1.0;
        for (int q = 0; q < 8; ++q) {
          const double c = lo + (hi - lo) * q / 8.0, d = lo + (hi - lo) * (q + 1) / 8.0;
          for (std::size_t j = 0; j < rule.size(); ++j) {
            const double t = map(c, d, j);
            inner += 0.5 * (d - c) * rule.weights[j] * bump.density(t) * std::abs(s - t);
          }
        }
      }
      sum += ws * inner;
    }
  }
  const MaxSmoother M = make_max_smoother(1.0);
  EXPECT_NEAR(M(0.0, 0.0), 0.5 * sum, 1e-9);
  EXPECT_GE(M(0.0, 0.0), 0.0);
}

TEST(MaxSmoother, RandomizedProperties) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::uniform_real_distribution<double> epsd(0.05, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double C = MaxSmoother::gap_constant();
  for (int k = 0; k < 200; ++k) {
    const double e1 = epsd(rng), e2 = e1 + 0.5 * epsd(rng);
    const MaxSmoother M1(e1), M2(e2);
    const double x = pos(rng), y = pos(rng), dx = unit(rng);
    // (a1) nondecreasing and midpoint convex.
    EXPECT_LE(M1(x, y), M1(x + dx, y) + 1e-12);
    EXPECT_LE(M1(x, y), M1(x, y + dx) + 1e-12);
    const double x2 = pos(rng), y2 = pos(rng);
    EXPECT_LE(M1(0.5 * (x + x2), 0.5 * (y + y2)), 0.5 * (M1(x, y) + M1(x2, y2)) + 1e-9);
    // (a2) nondecreasing in eps.
    EXPECT_LE(M1(x, y), M2(x, y) + 1e-12);
    // (a3) uniform closeness to max.
    EXPECT_LE(std::abs(M1(x, y) - std::max(x, y)), e1 * C + 1e-12);
    // (a6), (a7).
    EXPECT_GE(M1(x, y), x - 1e-12);
    EXPECT_GE(M1(x, y), y - 1e-12);
    // (a4), (a5).
    EXPECT_EQ(M1(y + 2.0 * e1 + dx, y), y + 2.0 * e1 + dx);
    EXPECT_EQ(M1(x, x + 2.0 * e1 + dx), x + 2.0 * e1 + dx);
  }
}

TEST(MaxSmoother, ShrinkingEpsApproachesMax) {
  const double x = 0.3, y = 0.31;
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.1, 0.01, 0.001}) {
    const double gap = std::abs(MaxSmoother(eps)(x, y) - std::max(x, y));
    EXPECT_LE(gap, eps * MaxSmoother::gap_constant() + 1e-12);
    EXPECT_LE(gap, prev + 1e-15);
    prev = gap;
  }
}

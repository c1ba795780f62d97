#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "minl2/analysis.hpp"

using namespace minl2;

namespace {

constexpr double pi = std::numbers::pi;

GTransform unit_g() { return build_g(WeightFunction::constant(), default_t_max(WeightFunction::constant())); }

GCurve closed_form_curve(double (*G)(double), double t_max, int count) {
  const auto t = linear_grid(0.0, t_max, count);
  std::vector<double> v;
  for (double x : t) v.push_back(G(x));
  return make_curve(unit_g(), t, v);
}

double disk_G(double t) { return pi * std::exp(-t); }
double gauss_G(double t) { return pi * (1.0 - std::exp(-std::exp(-t))); }
double zero_G(double) { return 0.0; }

ExtensionProblem disk_problem(PhiSpec phi = PhiSpec::zero(), WeightFunction c = WeightFunction::constant()) {
  return {DomainModel::disk(phi), IdealSpec::maximal_power(1), Polynomial::constant(1, 1.0), c, 4};
}

}  // namespace

TEST(Concavity, DiskIsLinearWithSlopePi) {
  const ConcavityReport rep = check_concavity(closed_form_curve(disk_G, 10.0, 41));
  EXPECT_EQ(rep.verdict, ConcavityVerdict::linear);
  ASSERT_TRUE(rep.k_c.has_value());
  EXPECT_NEAR(*rep.k_c, pi, 1e-12);
}

TEST(Concavity, GaussianIsStrictlyConcave) {
  const GCurve curve = closed_form_curve(gauss_G, 3.0, 31);
  const ConcavityReport rep = check_concavity(curve);
  EXPECT_EQ(rep.verdict, ConcavityVerdict::strictly_concave);
  EXPECT_FALSE(rep.linear);
  EXPECT_LT(rep.max_second_difference, 0.0);
  for (std::size_t i = 0; i < rep.second_differences.size(); ++i) EXPECT_LT(rep.second_differences[i], 0.0);
}

TEST(Concavity, ZeroCurveIsLinearWithSlopeZero) {
  const ConcavityReport rep = check_concavity(closed_form_curve(zero_G, 5.0, 11));
  EXPECT_TRUE(rep.concave);
  EXPECT_TRUE(rep.linear);
  EXPECT_EQ(*rep.k_c, 0.0);
}

TEST(Concavity, ConvexBumpIsViolatedWithWitness) {
  auto t = linear_grid(0.0, 4.0, 21);
  std::vector<double> G;
  for (double x : t) G.push_back(pi * std::exp(-x) + (std::abs(x - 2.0) < 1e-9 ? -0.01 : 0.0));
  const ConcavityReport rep = check_concavity(make_curve(unit_g(), t, G));
  EXPECT_EQ(rep.verdict, ConcavityVerdict::violated);
  ASSERT_TRUE(rep.witness_r.has_value());
  EXPECT_NEAR(*rep.witness_r, std::exp(-2.0), 1e-9);
}

// The concave verdict holds exactly when every second difference is within tolerance.
TEST(Concavity, VerdictMatchesSecondDifferencesProperty) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-12.0, -4.0);
  const auto t = linear_grid(0.0, 6.0, 25);
  for (int k = 0; k < 100; ++k) {
    const double amp = std::pow(10.0, scale(rng));
    std::vector<double> G;
    for (double x : t) G.push_back(pi * std::exp(-x) + amp * noise(rng));
    const ConcavityReport rep = check_concavity(make_curve(unit_g(), t, G));
    bool all = true;
    for (double d : rep.second_differences) all = all && d <= rep.tolerance;
    EXPECT_EQ(rep.concave, all);
    EXPECT_EQ(rep.concave, rep.max_second_difference <= rep.tolerance);
  }
}

TEST(Concavity, GridErrors) {
  EXPECT_THROW(make_curve(unit_g(), {0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), ParameterError);
  EXPECT_THROW(check_concavity(closed_form_curve(disk_G, 1.0, 4)), ParameterError);
}

TEST(Concavity, SampledSuiteCurvesNeverViolate) {
  const std::vector<ExtensionProblem> problems = {
      disk_problem(), disk_problem(PhiSpec::radial_power(1.0)),
      disk_problem(PhiSpec::radial_power(0.5), WeightFunction::exp_rate(0.5)),
      disk_problem(PhiSpec::zero(), WeightFunction::rational(1.0))};
  for (const auto& p : problems) {
    const GTransform g = build_g(p.c, default_t_max(p.c));
    const GCurve curve = sample_curve(p, g, linear_grid(0.0, 6.0, 25));
    EXPECT_TRUE(check_concavity(curve).concave) << p.c.describe();
  }
}

TEST(Monotone, DecayAndVacuousZero) {
  const MonotoneReport disk = check_monotone_limits(closed_form_curve(disk_G, 10.0, 21));
  EXPECT_TRUE(disk.pass);
  EXPECT_NEAR(disk.decay_ratio, std::exp(-10.0), 1e-15);
  const MonotoneReport gauss = check_monotone_limits(closed_form_curve(gauss_G, 10.0, 21));
  EXPECT_TRUE(gauss.nonincreasing);
  EXPECT_TRUE(check_monotone_limits(closed_form_curve(zero_G, 10.0, 21)).pass);
}

TEST(Linearity, DiskAllTrue) {
  const LinearityVerdict v = check_linearity_equivalence(closed_form_curve(disk_G, 10.0, 41));
  EXPECT_TRUE(v.linear && v.some_t0 && v.tail_limit && v.agree);
  EXPECT_NEAR(v.k_c, pi, 1e-12);
  EXPECT_NEAR(v.tail_ratio, pi, 1e-8);
}

TEST(Linearity, GaussianAllFalse) {
  const LinearityVerdict v = check_linearity_equivalence(closed_form_curve(gauss_G, 10.0, 41));
  EXPECT_FALSE(v.linear);
  EXPECT_FALSE(v.some_t0);
  EXPECT_FALSE(v.tail_limit);
  EXPECT_TRUE(v.agree);
  EXPECT_NEAR(v.k_c, pi * (1.0 - std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(v.tail_ratio, pi, 1e-3);
}

TEST(Linearity, ZeroCurveDegenerate) {
  const LinearityVerdict v = check_linearity_equivalence(closed_form_curve(zero_G, 10.0, 21));
  EXPECT_TRUE(v.linear && v.some_t0 && v.tail_limit && v.agree);
}

TEST(Linearity, NeedsCurveStartingAtT) {
  const auto t = linear_grid(0.5, 5.0, 10);
  std::vector<double> G;
  for (double x : t) G.push_back(disk_G(x));
  EXPECT_THROW(check_linearity_equivalence(make_curve(unit_g(), t, G)), ParameterError);
}

TEST(EffectiveLinearity, DiskWithExponentialWeight) {
  const auto grid = linear_grid(0.0, 8.0, 17);
  const EffectiveLinearityReport rep =
      check_effective_linearity(disk_problem(), WeightFunction::exp_rate(0.5), grid);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.k_c, pi, 1e-12);
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    const double exact = 2.0 * pi * std::exp(-0.5 * rep.t[i]);
    EXPECT_NEAR(rep.lhs[i] / exact, 1.0, 1e-10);
    EXPECT_NEAR(rep.rhs[i] / exact, 1.0, 1e-10);
  }
  EXPECT_LT(rep.max_coefficient_gap, 1e-8);
}

TEST(EffectiveLinearity, SameWeightReducesToLinearity) {
  const EffectiveLinearityReport rep =
      check_effective_linearity(disk_problem(), WeightFunction::constant(), linear_grid(0.0, 6.0, 13));
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.max_relative_residual, 1e-10);
}

TEST(EffectiveLinearity, NonlinearProblemRaises) {
  EXPECT_THROW(check_effective_linearity(disk_problem(PhiSpec::radial_power(1.0)), WeightFunction::exp_rate(0.5),
                                         linear_grid(0.0, 6.0, 13)),
               HypothesisError);
  EXPECT_THROW(check_effective_linearity(disk_problem(), WeightFunction::exp_rate(1.5), linear_grid(0.0, 6.0, 13)),
               HypothesisError);
}

TEST(BergmanRestriction, DiskAndBall) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  std::vector<std::vector<cplx>> disk_samples, ball_samples;
  for (int i = 0; i < 5; ++i) {
    disk_samples.push_back({cplx(u(rng), u(rng))});
    ball_samples.push_back({cplx(u(rng), u(rng)) * 0.7, cplx(u(rng), u(rng)) * 0.7});
  }
  const auto grid = std::vector<double>{0.0, 1.0, 2.0, 4.0};
  const auto disk = bergman_restriction_check(DomainModel::disk(), grid, disk_samples);
  EXPECT_TRUE(disk.pass);
  EXPECT_LT(disk.max_ratio_error_all, 1e-6);
  EXPECT_LT(disk.max_duality_error, 1e-8);
  EXPECT_LT(disk.max_ratio_error[0], 1e-12);
  const auto ball = bergman_restriction_check(DomainModel::ball(2), grid, ball_samples);
  EXPECT_TRUE(ball.pass && ball.statement1 && ball.statement2 && ball.statement3);
  EXPECT_LT(ball.max_ratio_error_all, 1e-6);
  EXPECT_LT(ball.max_duality_error, 1e-8);
}

TEST(LayerCake, DiskClosedForm) {
  const LayerCakeResult r = layer_cake(DomainModel::disk(), [](std::span<const cplx>) { return 1.0; },
                                       TestFunction::saturating_exp(1.0, 1.0), 0.0);
  EXPECT_NEAR(r.lhs, 0.5 * pi, 1e-10);
  EXPECT_NEAR(r.rhs, 0.5 * pi, 1e-10);
}

TEST(LayerCake, ConstantAndZero) {
  const DomainModel dom = DomainModel::disk(PhiSpec::radial_power(1.0));
  const PointIntegrand f = [&](std::span<const cplx> z) { return dom.phi().exp_neg(z); };
  const LayerCakeResult r = layer_cake(dom, f, TestFunction::constant(2.5), 0.5);
  EXPECT_NEAR(r.lhs, 2.5 * pi * (1.0 - std::exp(-std::exp(-0.5))), 1e-10);
  EXPECT_NEAR(r.rhs, r.lhs, 1e-12);
  const LayerCakeResult z = layer_cake(dom, [](std::span<const cplx>) { return 0.0; }, TestFunction::constant(1.0), 0.0);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.residual, 0.0);
}

TEST(LayerCake, RandomInstances) {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double a = 1.5 * u(rng);
    const double amp = 0.2 + 2.0 * u(rng), rate = 0.2 + u(rng), offset = u(rng);
    const double T = 2.0 * u(rng);
    const cplx coef(u(rng) - 0.5, u(rng) - 0.5);
    const DomainModel dom = DomainModel::disk(PhiSpec::radial_power(a));
    const PointIntegrand f = [&](std::span<const cplx> z) { return dom.phi().exp_neg(z) * std::norm(1.0 + coef * z[0]); };
    const LayerCakeResult r = layer_cake(dom, f, TestFunction::saturating_exp(amp, rate, offset), T);
    EXPECT_LT(r.residual, 1e-6) << k;
  }
}

TEST(IntByParts, ClosedForms) {
  const IntByPartsResult a = int_by_parts_identity(WeightFunction::constant(), TestFunction::saturating_exp(1.0, 1.0), 0.0);
  EXPECT_NEAR(a.weighted, 0.5, 1e-12);
  EXPECT_NEAR(a.parts, 0.5, 1e-12);
  EXPECT_NEAR(a.boundary, 0.0, 1e-15);
  EXPECT_LT(std::abs(a.residual), 1e-10);
  EXPECT_TRUE(a.limit_hypothesis);

  const IntByPartsResult b =
      int_by_parts_identity(WeightFunction::exp_rate(0.5), TestFunction::saturating_exp(1.0, 0.25), 1.0);
  EXPECT_NEAR(b.weighted, 2.0 * std::exp(-0.5) - (4.0 / 3.0) * std::exp(-0.75), 1e-12);
  EXPECT_LT(std::abs(b.residual), 1e-9);

  const IntByPartsResult zero = int_by_parts_identity(WeightFunction::constant(), TestFunction::saturating_exp(0.0, 1.0), 0.0);
  EXPECT_EQ(zero.residual, 0.0);

  const IntByPartsResult c =
      int_by_parts_identity(WeightFunction::rational(1.0), TestFunction::saturating_exp(2.0, 1.0, 0.5), 0.5);
  EXPECT_LT(std::abs(c.residual), 1e-9);
}

TEST(Quotient, DiskEqualityAndGaussianStrict) {
  const auto grid = linear_grid(0.0, 6.0, 25);
  const auto a = TestFunction::saturating_exp(1.0, 0.5);
  const auto disk = quotient_monotonicity(DomainModel::disk(), [](std::span<const cplx>) { return 1.0; }, a,
                                          WeightFunction::constant(), 0.0, grid);
  EXPECT_TRUE(disk.hypothesis_holds && disk.hypothesis_equality);
  EXPECT_TRUE(disk.equality_expected && disk.equality_holds);
  EXPECT_NEAR(disk.margin, 0.0, 1e-8);

  const DomainModel g = DomainModel::disk(PhiSpec::radial_power(1.0));
  const auto gauss = quotient_monotonicity(g, [&](std::span<const cplx> z) { return g.phi().exp_neg(z); }, a,
                                           WeightFunction::constant(), 0.0, grid);
  EXPECT_TRUE(gauss.hypothesis_holds);
  EXPECT_FALSE(gauss.hypothesis_equality);
  EXPECT_TRUE(gauss.conclusion_holds);
  EXPECT_GT(gauss.margin, 1e-4);

  EXPECT_THROW(quotient_monotonicity(DomainModel::disk(), [](std::span<const cplx>) { return 0.0; }, a,
                                     WeightFunction::constant(), 0.0, grid),
               ParameterError);
}

TEST(BoundaryMeasure, BidiscSlice) {
  EXPECT_NEAR(sphere_area(1), 2.0 * pi, 1e-15);
  EXPECT_NEAR(sphere_area(2), 4.0 * pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 2.0 * pi * pi, 1e-14);
  const DomainModel dom = DomainModel::polydisc_slice({1.0, 1.0}, 1);
  const std::vector<double> ts{1.0, 2.0, 4.0, 8.0};
  const auto one = boundary_measure(dom, Polynomial::constant(2, 1.0), ts);
  EXPECT_TRUE(one.converged);
  EXPECT_NEAR(one.limit, pi, 1e-9);
  for (double e : one.estimates) EXPECT_NEAR(e, pi, 1e-9);
  const auto moment = boundary_measure(dom, Polynomial::monomial({1, 0}), ts);
  EXPECT_NEAR(moment.limit, 0.5 * pi, 1e-9);
  const auto zero = boundary_measure(dom, Polynomial(2), ts);
  EXPECT_EQ(zero.limit, 0.0);
}

TEST(OptimalExtension, BidiscWithUnitAndExponentialWeights) {
  const ExtensionProblem p{DomainModel::polydisc_slice({1.0, 1.0}, 1), IdealSpec::slice(1),
                           Polynomial::constant(2, 1.0), WeightFunction::constant(), 2};
  const auto grid = linear_grid(0.0, 6.0, 7);
  const OptimalExtensionReport unit = optimal_extension_check(p, WeightFunction::constant(), grid);
  EXPECT_TRUE(unit.pass);
  EXPECT_NEAR(unit.global_norm, pi * pi, 1e-9);
  EXPECT_NEAR(unit.boundary_value, pi, 1e-9);
  EXPECT_NEAR(unit.global_rhs, pi * pi, 1e-9);
  EXPECT_LT(unit.max_decay_error, 1e-9);
  EXPECT_LT(unit.max_coefficient_gap, 1e-8);

  const OptimalExtensionReport weighted = optimal_extension_check(p, WeightFunction::exp_rate(0.5), grid);
  EXPECT_TRUE(weighted.pass);
  for (std::size_t i = 0; i < weighted.t.size(); ++i)
    EXPECT_NEAR(weighted.weighted_bounds[i] / (2.0 * pi * pi * std::exp(-0.5 * weighted.t[i])), 1.0, 1e-9);
  EXPECT_LT(weighted.max_weighted_gap, 1e-8);
}

TEST(OptimalExtension, ZeroDatum) {
  ExtensionProblem p{DomainModel::polydisc_slice({1.0, 1.0}, 1), IdealSpec::slice(1), Polynomial(2),
                     WeightFunction::constant(), 2};
  p.allow_zero_datum = true;
  const OptimalExtensionReport rep = optimal_extension_check(p, WeightFunction::constant(), linear_grid(0.0, 4.0, 5));
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.global_norm, 0.0);
}

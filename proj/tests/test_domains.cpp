#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "minl2/domains.hpp"

using namespace minl2;

namespace {

constexpr double pi = std::numbers::pi;

double one(std::span<const cplx>) { return 1.0; }

Polynomial two_plus_z() {
  Polynomial h(1);
  h.add({0}, 2.0);
  h.add({1}, 1.0);
  return h;
}

}  // namespace

TEST(Domain, PsiAndSublevelSets) {
  const DomainModel disk = DomainModel::disk();
  const std::vector<cplx> z{cplx(0.3, 0.4)};
  EXPECT_NEAR(disk.psi(z), 2.0 * std::log(0.5), 1e-15);
  EXPECT_TRUE(disk.in_sublevel(z, 1.0));
  EXPECT_FALSE(disk.in_sublevel(z, 1.5));
  EXPECT_NEAR(disk.sublevel_scale(2.0), std::exp(-1.0), 1e-15);

  const DomainModel ball = DomainModel::ball(2);
  const std::vector<cplx> w{cplx(0.6, 0.0), cplx(0.0, 0.6)};
  EXPECT_NEAR(ball.psi(w), 4.0 * std::log(std::sqrt(0.72)), 1e-15);
  EXPECT_FALSE(ball.contains(std::vector<cplx>{cplx(0.8), cplx(0.8)}));

  const DomainModel poly = DomainModel::polydisc({2.0, 1.0});
  const std::vector<cplx> p{cplx(1.0), cplx(0.25)};
  EXPECT_NEAR(poly.psi(p), 4.0 * std::log(0.5), 1e-15);
}

TEST(Domain, DiskVolumes) {
  const DomainModel disk = DomainModel::disk();
  for (double t : {0.0, 1.0, 5.0}) {
    EXPECT_NEAR(sublevel_volume_integral(disk, t, one).value, pi * std::exp(-t), 1e-12);
    const double m2 = sublevel_volume_integral(disk, t, [](std::span<const cplx> z) { return std::norm(z[0]); }).value;
    EXPECT_NEAR(m2, 0.5 * pi * std::exp(-2.0 * t), 1e-12);
  }
}

TEST(Domain, BallVolumes) {
  const DomainModel ball = DomainModel::ball(2);
  for (double t : {0.0, 1.5}) {
    const double R = std::exp(-t / 4.0);
    EXPECT_NEAR(sublevel_volume_integral(ball, t, one).value, 0.5 * pi * pi * std::exp(-t), 1e-12);
    const double m = sublevel_volume_integral(ball, t, [](std::span<const cplx> z) { return std::norm(z[0]); }).value;
    EXPECT_NEAR(m, pi * pi * std::pow(R, 6) / 6.0, 1e-12);
  }
  QuadratureGrid light;
  light.angular_multi = 4;
  light.simplex_order = 12;
  const DomainModel ball3 = DomainModel::ball(3);
  EXPECT_NEAR(sublevel_volume_integral(ball3, 0.0, one, light).value, std::pow(pi, 3) / 6.0, 1e-12);
}

TEST(Domain, PolydiscVolumes) {
  const DomainModel unit = DomainModel::polydisc({1.0, 1.0});
  EXPECT_NEAR(sublevel_volume_integral(unit, 2.0, one).value, pi * pi * std::exp(-2.0), 1e-12);
  const DomainModel wide = DomainModel::polydisc({2.0, 1.0});
  EXPECT_NEAR(sublevel_volume_integral(wide, 1.0, one).value, 4.0 * pi * pi * std::exp(-1.0), 1e-11);
  const double m = sublevel_volume_integral(unit, 0.0, [](std::span<const cplx> z) { return std::norm(z[0] * z[1]); }).value;
  EXPECT_NEAR(m, pi * pi / 4.0, 1e-12);
}

TEST(Domain, SliceStripAndVolume) {
  const DomainModel slice = DomainModel::polydisc_slice({1.0, 1.0}, 1);
  EXPECT_EQ(slice.pole_dimension(), 1);
  EXPECT_TRUE(slice.is_slice());
  for (double t : {0.0, 2.0}) {
    EXPECT_NEAR(sublevel_volume_integral(slice, t, one).value, pi * pi * std::exp(-t), 1e-12);
    const auto strip = strip_integral(slice, t, [](std::span<const cplx>, double) { return 1.0; });
    EXPECT_NEAR(strip.value, pi * pi * (std::exp(-t) - std::exp(-t - 1.0)), 1e-12);
  }
}

TEST(Domain, NonReinhardtPhiAgainstSeries) {
  // int_D |2 + z|^{-2} = (pi/4) sum_k 4^{-k}/(k+1) = pi log(4/3).
  const DomainModel dom = DomainModel::disk(PhiSpec::log_modulus(two_plus_z()));
  EXPECT_FALSE(dom.reinhardt());
  const double v = sublevel_volume_integral(dom, 0.0, [&](std::span<const cplx> z) { return dom.phi().exp_neg(z); }).value;
  EXPECT_NEAR(v, pi * std::log(4.0 / 3.0), 1e-10);
}

TEST(Domain, RawPathAgreesWithLevelPath) {
  const DomainModel dom = DomainModel::disk(PhiSpec::radial_power(1.0));
  const PointIntegrand f = [&](std::span<const cplx> z) { return dom.phi().exp_neg(z) * std::norm(1.0 + z[0]); };
  for (double t : {0.0, 1.0}) {
    const double level = sublevel_volume_integral(dom, t, f).value;
    EXPECT_NEAR(raw_sublevel_integral(dom, t, f, 256), level, 1e-3 * level);
  }
  const DomainModel ball = DomainModel::ball(2);
  EXPECT_NEAR(raw_sublevel_integral(ball, 0.5, one, 64), 0.5 * pi * pi * std::exp(-0.5), 1e-3);
  const DomainModel poly = DomainModel::polydisc({1.0, 0.5});
  EXPECT_NEAR(raw_sublevel_integral(poly, 0.0, one, 64), pi * pi * 0.25, 1e-3);
}

TEST(Domain, GaussianWeightClosedForm) {
  // int_{|z|<R} e^{-|z|^2} = pi (1 - e^{-R^2}).
  const DomainModel dom = DomainModel::disk(PhiSpec::radial_power(1.0));
  for (double t : {0.0, 0.7, 3.0}) {
    const double v = sublevel_volume_integral(dom, t, [&](std::span<const cplx> z) { return dom.phi().exp_neg(z); }).value;
    EXPECT_NEAR(v, pi * (1.0 - std::exp(-std::exp(-t))), 1e-13);
  }
}

TEST(Domain, Errors) {
  Polynomial h(1);
  h.add({1}, 1.0);
  EXPECT_THROW(DomainModel::disk(PhiSpec::log_modulus(h)), ParameterError);
  EXPECT_THROW(DomainModel::ball(0), ParameterError);
  EXPECT_THROW(DomainModel::polydisc({1.0, -1.0}), ParameterError);
  EXPECT_THROW(DomainModel::polydisc_slice({1.0, 1.0}, 3), ParameterError);
  EXPECT_THROW(sublevel_volume_integral(DomainModel::disk(), -0.5, one), DomainError);
}

TEST(Domain, RefinementErrorOnRoughIntegrand) {
  QuadratureGrid coarse;
  coarse.angular = 4;
  coarse.refine_tol = 1e-12;
  const DomainModel dom = DomainModel::disk();
  // High angular frequency is invisible to a 4-node trapezoid but not to the refined rule.
  const PointIntegrand f = [](std::span<const cplx> z) { return 1.0 + std::real(std::pow(z[0], 4)); };
  EXPECT_THROW(sublevel_volume_integral(dom, 0.0, f, coarse), RefinementError);
}

TEST(Domain, ConditionThree) {
  const DomainModel disk = DomainModel::disk();
  const Condition3Report rep = check_condition3(disk, WeightFunction::constant(), 0.9);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.lower_bound, 1.0, 1e-12);
  const DomainModel gauss = DomainModel::disk(PhiSpec::radial_power(1.0));
  EXPECT_NEAR(check_condition3(gauss, WeightFunction::constant(), 0.9).lower_bound, std::exp(-0.81), 1e-3);
}

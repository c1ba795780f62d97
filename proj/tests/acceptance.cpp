// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "minl2/analysis.hpp"
#include "minl2/config.hpp"
#include "minl2/odekit.hpp"

using namespace minl2;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

ExtensionProblem unit_problem(DomainModel dom, WeightFunction c = WeightFunction::constant(), int degree = 2) {
  const int n = dom.dimension();
  return {std::move(dom), IdealSpec::maximal_power(1), Polynomial::constant(n, 1.0), c, degree};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void disk_linear_law(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const ExtensionProblem p = unit_problem(DomainModel::disk());
  double analytic = 0.0, raw = 0.0;
  for (double t : linear_grid(0.0, 10.0, 41)) {
    const MinimalIntegralResult r = minimal_integral(p, t);
    const double exact = pi * std::exp(-t);
    analytic = std::max(analytic, std::abs(r.value - exact) / exact);
    const Polynomial F = r.minimizer(1);
    const double G_raw =
        raw_sublevel_integral(p.dom, t, [&](std::span<const cplx> z) { return std::norm(F(z)); }, 256);
    raw = std::max(raw, std::abs(G_raw - exact) / exact);
  }
  const double elapsed = seconds_since(start);
  o.detail << "analytic " << analytic << ", raw " << raw << ", " << elapsed << " s ";
  o.require(analytic <= 1e-6, "analytic path");
  o.require(raw <= 1e-3, "raw path");
  o.require(elapsed < 5.0, "runtime");
}

void strict_concavity(Outcome& o) {
  const ExtensionProblem p = unit_problem(DomainModel::disk(PhiSpec::radial_power(1.0)));
  const GTransform g = build_g(p.c, default_t_max(p.c));
  const double h = 0.05;
  std::vector<double> r;
  for (int i = 1; i <= 20; ++i) r.push_back(h * i);
  const GCurve curve = sample_curve_r(p, g, r);
  double value_err = 0.0, worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double exact = pi * (1.0 - std::exp(-curve.r[i]));
    value_err = std::max(value_err, std::abs(curve.G[i] - exact) / exact);
  }
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double d2 = curve.G[i + 1] - 2.0 * curve.G[i] + curve.G[i - 1];
    const double bound = -0.5 * pi * std::exp(-curve.r[i]) * h * h;
    worst_margin = std::max(worst_margin, d2 - bound);
  }
  const ConcavityReport rep = check_concavity(curve);
  o.detail << "value err " << value_err << ", max(d2 - bound) " << worst_margin << ", verdict " << to_string(rep.verdict)
           << " ";
  o.require(value_err <= 1e-3, "closed form");
  o.require(worst_margin <= 0.0, "second-difference margin");
  o.require(rep.verdict == ConcavityVerdict::strictly_concave, "verdict");
}

void ode_residuals(Outcome& o) {
  for (const auto& c : {WeightFunction::constant(), WeightFunction::exp_rate(0.5), WeightFunction::rational(1.0)}) {
    const auto grid = linear_grid(c.T() + 0.1, c.T() + 10.0, 400);
    const GzResidualReport rep = verify_gz_residuals(solve_gz(c), grid);
    o.detail << c.describe() << ": " << rep.max_res1 << "/" << rep.max_res2 << " ";
    o.require(rep.rows.size() == grid.size(), "grid coverage " + c.describe());
    o.require(rep.max_res1 <= 1e-8 && rep.max_res2 <= 1e-8, "residuals " + c.describe());
    o.require(rep.min_positivity > 0.0, "u''s - s'' > 0 " + c.describe());
  }
}

void bergman_restriction(Outcome& o) {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto samples = [&](int n) {
    std::vector<std::vector<cplx>> out;
    while (out.size() < 5) {
      std::vector<cplx> z;
      double norm2 = 0.0;
      for (int j = 0; j < n; ++j) {
        z.emplace_back(u(rng), u(rng));
        norm2 += std::norm(z.back());
      }
      if (norm2 < 0.64) out.push_back(z);
    }
    return out;
  };
  const std::vector<double> ts{0.5, 1.0, 2.0};
  for (const auto& dom : {DomainModel::disk(), DomainModel::ball(2)}) {
    const auto rep = bergman_restriction_check(dom, ts, samples(dom.dimension()));
    o.detail << dom.describe() << ": ratio " << rep.max_ratio_error_all << ", duality " << rep.max_duality_error << " ";
    o.require(rep.samples == 5 * static_cast<int>(ts.size()), "sample count");
    o.require(rep.max_ratio_error_all <= 1e-6, "restriction law " + dom.describe());
    o.require(rep.max_duality_error <= 1e-8, "kernel duality " + dom.describe());
  }
}

std::vector<fs::path> reference_configs() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(MINL2_REFERENCE_CONFIGS))
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

void linearity_equivalence(Outcome& o) {
  int members = 0, disagreements = 0, wrong = 0;
  for (const auto& file : reference_configs()) {
    const ExperimentConfig cfg = load_config(file.string());
    const bool has_curve = std::any_of(cfg.checks.begin(), cfg.checks.end(), [](const std::string& c) {
      return c == "compute-g" || c == "check-linearity" || c == "check-concavity";
    });
    if (!has_curve) continue;
    ++members;
    const ExtensionProblem p = cfg.problem();
    const GTransform g = build_g(p.c, default_t_max(p.c));
    std::vector<double> t = linear_grid(p.c.T(), p.c.T() + 10.0, 21);
    const LinearityVerdict v = check_linearity_equivalence(sample_curve(p, g, t));
    const bool expected_linear = p.dom.phi().tag() == PhiSpec::Tag::zero;
    o.detail << cfg.name << "=" << (v.linear ? "T" : "F") << (v.some_t0 ? "T" : "F") << (v.tail_limit ? "T" : "F") << " ";
    if (!v.agree) ++disagreements;
    if (v.linear != expected_linear) ++wrong;
  }
  o.require(members >= 6, "suite coverage");
  o.require(disagreements == 0, "three criteria agree");
  o.require(wrong == 0, "linear exactly on the phi = 0 members");
}

void effective_linearity(Outcome& o) {
  const ExtensionProblem p = unit_problem(DomainModel::disk());
  const EffectiveLinearityReport rep = check_effective_linearity(p, WeightFunction::exp_rate(0.5), linear_grid(0.0, 10.0, 21));
  double err = 0.0;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    const double exact = 2.0 * pi * std::exp(-0.5 * rep.t[i]);
    err = std::max(err, std::abs(rep.lhs[i] - exact) / exact);
  }
  o.detail << "lhs err " << err << ", coefficient gap " << rep.max_coefficient_gap << " ";
  o.require(err <= 1e-6, "closed form 2 pi e^{-t/2}");
  o.require(rep.max_coefficient_gap <= 1e-8, "minimizer coefficients");
}

void layer_cake_checks(Outcome& o) {
  const LayerCakeResult base = layer_cake(DomainModel::disk(), [](std::span<const cplx>) { return 1.0; },
                                          TestFunction::saturating_exp(1.0, 1.0), 0.0);
  const double e_lhs = std::abs(base.lhs - 0.5 * pi) / (0.5 * pi);
  const double e_rhs = std::abs(base.rhs - 0.5 * pi) / (0.5 * pi);
  o.require(e_lhs <= 1e-6 && e_rhs <= 1e-6, "disk pi/2");
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const DomainModel dom = DomainModel::disk(PhiSpec::radial_power(2.0 * u(rng)));
    const cplx c1(u(rng) - 0.5, u(rng) - 0.5), c2(u(rng) - 0.5, u(rng) - 0.5);
    const PointIntegrand f = [&](std::span<const cplx> z) {
      return dom.phi().exp_neg(z) * std::norm(1.0 + c1 * z[0] + c2 * z[0] * z[0]);
    };
    const auto a = TestFunction::saturating_exp(0.1 + 3.0 * u(rng), 0.1 + 1.5 * u(rng), u(rng));
    worst = std::max(worst, layer_cake(dom, f, a, 3.0 * u(rng)).residual);
  }
  o.detail << "disk " << e_lhs << "/" << e_rhs << ", random worst " << worst << " ";
  o.require(worst <= 1e-6, "random instances");
}

void integration_by_parts(Outcome& o) {
  struct Case {
    WeightFunction c;
    TestFunction a;
    double t0;
    double weighted;
  };
  const std::vector<Case> cases = {
      {WeightFunction::constant(), TestFunction::saturating_exp(1.0, 1.0), 0.0, 0.5},
      {WeightFunction::exp_rate(0.5), TestFunction::saturating_exp(1.0, 0.25), 1.0,
       2.0 * std::exp(-0.5) - (4.0 / 3.0) * std::exp(-0.75)},
      // int_2^inf e^{-s}(1/2 + 2(1 - e^{-s})) ds = 2.5 e^{-2} - e^{-4}
      {WeightFunction::constant(), TestFunction::saturating_exp(2.0, 1.0, 0.5), 2.0, 2.5 * std::exp(-2.0) - std::exp(-4.0)},
  };
  for (const auto& k : cases) {
    const IntByPartsResult r = int_by_parts_identity(k.c, k.a, k.t0);
    o.detail << std::abs(r.residual) << " ";
    o.require(std::abs(r.residual) <= 1e-9, "residual " + k.c.describe());
    o.require(std::abs(r.weighted - k.weighted) <= 1e-9, "closed form " + k.c.describe());
    o.require(r.limit_hypothesis, "limit hypothesis");
  }
}

void optimal_extension(Outcome& o) {
  const DomainModel bidisc = DomainModel::polydisc_slice({1.0, 1.0}, 1);
  const std::vector<double> ts{1.0, 2.0, 4.0, 8.0};
  const BoundaryMeasureEstimate bm = boundary_measure(bidisc, Polynomial::constant(2, 1.0), ts);
  double bm_err = 0.0;
  for (double e : bm.estimates) bm_err = std::max(bm_err, std::abs(e - pi));
  const ExtensionProblem p{bidisc, IdealSpec::slice(1), Polynomial::constant(2, 1.0), WeightFunction::constant(), 2};
  const OptimalExtensionReport rep = optimal_extension_check(p, WeightFunction::constant(), linear_grid(0.0, 6.0, 7));
  double decay = 0.0;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    const double exact = pi * pi * std::exp(-rep.t[i]);
    decay = std::max(decay, std::abs(rep.decay_values[i] - exact) / exact);
  }
  o.detail << "boundary " << bm_err << ", global " << std::abs(rep.global_norm - pi * pi) << "/"
           << std::abs(rep.global_rhs - pi * pi) << ", decay " << decay << ", coefficients " << rep.max_coefficient_gap
           << " ";
  o.require(bm_err <= 1e-3, "boundary measure");
  o.require(std::abs(rep.global_norm - pi * pi) <= 1e-3 && std::abs(rep.global_rhs - pi * pi) <= 1e-3, "global equality");
  o.require(decay <= 1e-3, "decay law");
  o.require(rep.max_coefficient_gap <= 1e-8, "restriction coefficients");
}

void structure_properties(Outcome& o) {
  // Pythagoras.
  double pyth = 0.0;
  for (const auto& p : {unit_problem(DomainModel::disk(), WeightFunction::constant(), 5),
                        unit_problem(DomainModel::disk(PhiSpec::radial_power(1.0)), WeightFunction::exp_rate(0.5), 5),
                        unit_problem(DomainModel::ball(2), WeightFunction::constant(), 3)}) {
    const GramSystem g = assemble_gram(p, 1.0);
    const auto rep = verify_pythagoras(g, solve_minimal(p, g), random_ideal_perturbations(g, 20, 42));
    o.require(rep.perturbations == 20, "perturbation count");
    pyth = std::max(pyth, rep.max_residual);
  }
  o.require(pyth <= 1e-10, "Pythagoras");

  // Monotone decay on the linear members.
  double decay = 0.0;
  for (const auto& dom : {DomainModel::disk(), DomainModel::ball(2), DomainModel::polydisc({1.0, 1.0})}) {
    const ExtensionProblem p = unit_problem(dom);
    const GTransform g = build_g(p.c, default_t_max(p.c));
    const MonotoneReport rep = check_monotone_limits(sample_curve(p, g, linear_grid(0.0, 10.0, 11)), 1e-4);
    o.require(rep.pass, "monotone " + dom.describe());
    decay = std::max(decay, rep.decay_ratio);
  }

  // M_eps (a1)-(a7) on 200 random trials.
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), epsd(0.05, 1.0), unit(0.0, 1.0);
  const double C = MaxSmoother::gap_constant();
  int m_failures = 0;
  for (int k = 0; k < 200; ++k) {
    const double e1 = epsd(rng), e2 = e1 + 0.5 * epsd(rng);
    const MaxSmoother M1(e1), M2(e2);
    const double x = pos(rng), y = pos(rng), dx = unit(rng), x2 = pos(rng), y2 = pos(rng);
    const double m = M1(x, y);
    bool ok = m <= M1(x + dx, y) + 1e-12 && m <= M1(x, y + dx) + 1e-12;
    ok = ok && M1(0.5 * (x + x2), 0.5 * (y + y2)) <= 0.5 * (m + M1(x2, y2)) + 1e-9;
    ok = ok && m <= M2(x, y) + 1e-12;
    ok = ok && std::abs(m - std::max(x, y)) <= e1 * C + 1e-12;
    ok = ok && M1(y + 2.0 * e1 + dx, y) == y + 2.0 * e1 + dx && M1(x, x + 2.0 * e1 + dx) == x + 2.0 * e1 + dx;
    ok = ok && m >= x - 1e-12 && m >= y - 1e-12;
    if (!ok) ++m_failures;
  }
  o.require(m_failures == 0, "M_eps properties");

  // v_eps properties 1)-3) on dense grids.
  int v_failures = 0;
  for (const auto& [t0, B, eps] : {std::tuple{0.0, 1.0, 0.1}, {1.0, 0.5, 0.05}, {1.0, 1.0, 0.01}}) {
    const SmoothedCutoff v = make_smoothed_cutoff(t0, B, eps);
    for (double t = -t0 - B - 1.0; t <= 1.0; t += 1e-3) {
      const bool inside = t > -t0 - B + eps && t < -t0 - eps;
      if (t >= -t0 - eps && std::abs(v.v(t) - t) > 1e-9) ++v_failures;
      if (v.d2v(t) < -1e-9 || v.d2v(t) > (inside ? 2.0 / B : 0.0) + 1e-9) ++v_failures;
      if (v.dv(t) < -1e-9 || v.dv(t) > 1.0 + 1e-9) ++v_failures;
    }
  }
  o.require(v_failures == 0, "v_eps properties");

  // Cutoff extension feasibility on the disk reference cases.
  int ext_failures = 0;
  for (const auto& c : {WeightFunction::constant(), WeightFunction::exp_rate(0.5)}) {
    const ExtensionProblem p = unit_problem(DomainModel::disk(), c, 4);
    for (double B : {1.0, 0.5, 0.25})
      if (!verify_extension_inequality(p, 1.0, B).pass) ++ext_failures;
  }
  o.require(ext_failures == 0, "extension inequality");
  o.detail << "pythagoras " << pyth << ", decay " << decay << ", M_eps failures " << m_failures << ", v_eps failures "
           << v_failures << ", extension failures " << ext_failures << " ";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"disk linear law", disk_linear_law},
      {"strict concavity (Gaussian weight)", strict_concavity},
      {"ODE residuals", ode_residuals},
      {"Bergman restriction law", bergman_restriction},
      {"linearity equivalence", linearity_equivalence},
      {"effective linearity", effective_linearity},
      {"layer cake", layer_cake_checks},
      {"integration by parts", integration_by_parts},
      {"optimal extension (bidisc)", optimal_extension},
      {"structure properties", structure_properties},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(3);
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "] ";
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2zu  %s: %s(%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

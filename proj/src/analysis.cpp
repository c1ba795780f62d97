#include "minl2/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace minl2 {

namespace {

constexpr double kPi = std::numbers::pi;

// Value at x0 of the interpolating polynomial through (xs, ys).
double neville(std::vector<double> xs, std::vector<double> ys, double x0) {
  const std::size_t n = xs.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      ys[i] = ((x0 - xs[i + level]) * ys[i] + (xs[i] - x0) * ys[i + 1]) / (xs[i] - xs[i + level]);
  return ys[0];
}

double g_value(const WeightFunction& c, double t) {
  if (auto closed = c.closed_form_tail_integral(t)) return *closed;
  return weighted_tail(c, t);
}

ExtensionProblem with_weight(const ExtensionProblem& problem, const WeightFunction& c) {
  ExtensionProblem out = problem;
  out.c = c;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Curves

GCurve make_curve(const GTransform& g, std::vector<double> t, std::vector<double> G) {
  if (t.size() != G.size()) throw ParameterError("curve: t and G differ in length");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ParameterError("curve: t-grid must be strictly increasing");
  GCurve curve;
  curve.T = g.weight().T();
  curve.total = g.total();
  for (double ti : t) curve.r.push_back(g(ti));
  curve.t = std::move(t);
  curve.G = std::move(G);
  curve.converged.assign(curve.t.size(), 1);
  return curve;
}

GCurve sample_curve(const ExtensionProblem& problem, const GTransform& g, const std::vector<double>& t_grid) {
  std::vector<double> G;
  std::vector<char> conv;
  for (double t : t_grid) {
    const auto res = minimal_integral(problem, t);
    G.push_back(res.value);
    conv.push_back(res.converged ? 1 : 0);
  }
  GCurve curve = make_curve(g, t_grid, std::move(G));
  curve.converged = std::move(conv);
  return curve;
}

GCurve sample_curve_r(const ExtensionProblem& problem, const GTransform& g, const std::vector<double>& r_grid) {
  std::vector<double> t;
  for (double r : r_grid) t.push_back(g.inverse(r));
  std::sort(t.begin(), t.end());
  return sample_curve(problem, g, t);
}

// ---------------------------------------------------------------------------
// Concavity

std::string to_string(ConcavityVerdict verdict) {
  switch (verdict) {
    case ConcavityVerdict::linear: return "linear";
    case ConcavityVerdict::strictly_concave: return "strictly_concave";
    case ConcavityVerdict::concave: return "concave";
    case ConcavityVerdict::violated: return "violated";
  }
  return "unknown";
}

ConcavityReport check_concavity(const GCurve& curve, double tol) {
  const std::size_t n = curve.size();
  if (n < 5) throw ParameterError("concavity check needs at least 5 grid points");
  if (!(tol > 0.0)) throw ParameterError("concavity tolerance must be positive");
  for (double G : curve.G)
    if (!std::isfinite(G)) throw ParameterError("concavity check needs finite G on the grid");
  // Increasing r.
  std::vector<double> r(curve.r.rbegin(), curve.r.rend());
  std::vector<double> G(curve.G.rbegin(), curve.G.rend());
  for (std::size_t i = 1; i < n; ++i)
    if (!(r[i] > r[i - 1])) throw ParameterError("concavity check: r-grid is not strictly monotone");

  double scale = 0.0;
  for (double v : G) scale = std::max(scale, std::abs(v));
  ConcavityReport report;
  report.tolerance = tol * scale;
  report.max_second_difference = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = r[i] - r[i - 1];
    const double h2 = r[i + 1] - r[i];
    const double d2 = 2.0 * ((G[i + 1] - G[i]) / h2 - (G[i] - G[i - 1]) / h1) / (h1 + h2);
    const double delta = d2 * h1 * h2;
    report.second_differences.push_back(delta);
    report.r_mid.push_back(r[i]);
    report.max_second_difference = std::max(report.max_second_difference, delta);
    max_abs = std::max(max_abs, std::abs(delta));
    if (delta > report.tolerance && !report.witness_r) report.witness_r = r[i];
  }
  const double first_slope = (G[1] - G[0]) / (r[1] - r[0]);
  const double last_slope = (G[n - 1] - G[n - 2]) / (r[n - 1] - r[n - 2]);
  report.slope_gap = std::abs(first_slope - last_slope);

  report.concave = report.max_second_difference <= report.tolerance;
  report.linear = report.concave && max_abs <= report.tolerance &&
                  report.slope_gap * (r[n - 1] - r[0]) <= static_cast<double>(n) * report.tolerance;
  if (report.linear) {
    report.verdict = ConcavityVerdict::linear;
    report.k_c = curve.G.front() / curve.r.front();
  } else if (report.max_second_difference <= -10.0 * report.tolerance) {
    report.verdict = ConcavityVerdict::strictly_concave;
  } else if (report.concave) {
    report.verdict = ConcavityVerdict::concave;
  } else {
    report.verdict = ConcavityVerdict::violated;
  }
  return report;
}

MonotoneReport check_monotone_limits(const GCurve& curve, double decay_tolerance) {
  MonotoneReport report;
  report.nonincreasing = true;
  double scale = 0.0;
  for (double v : curve.G) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve.G[i] > curve.G[i - 1] + 1e-12 * scale) {
      report.nonincreasing = false;
      if (!report.witness_t) report.witness_t = curve.t[i];
    }
  }
  if (curve.size() == 0) {
    report.decays = true;
  } else {
    report.decay_ratio = curve.G.front() != 0.0 ? curve.G.back() / curve.G.front() : 0.0;
    report.decays = curve.G.back() <= decay_tolerance * curve.G.front();
  }
  report.pass = report.nonincreasing && report.decays;
  return report;
}

// ---------------------------------------------------------------------------
// Linearity equivalence

LinearityVerdict check_linearity_equivalence(const GCurve& curve, double tol) {
  if (curve.size() < 5) throw ParameterError("linearity check needs at least 5 grid points");
  if (std::abs(curve.t.front() - curve.T) > 1e-12)
    throw ParameterError("linearity check needs the curve to start at t = T");
  LinearityVerdict v;
  v.linear = check_concavity(curve, 1e-8).linear;
  v.k_c = curve.G.front() / curve.total;
  const double bound = v.k_c * (1.0 + tol) + 1e-300;

  v.min_interior_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double ratio = curve.G[i] / curve.r[i];
    v.min_interior_ratio = std::min(v.min_interior_ratio, ratio);
    if (ratio <= bound && !v.t0_witness) v.t0_witness = curve.t[i];
  }
  v.some_t0 = v.t0_witness.has_value();

  const std::size_t n = curve.size();
  auto tail = [&](std::size_t points) {
    std::vector<double> xs, ys;
    for (std::size_t i = n - points; i < n; ++i) {
      xs.push_back(curve.r[i]);
      ys.push_back(curve.G[i] / curve.r[i]);
    }
    return neville(xs, ys, 0.0);
  };
  v.tail_ratio = tail(3);
  const double check = tail(4);
  v.extrapolation_stable = std::abs(check - v.tail_ratio) <= 1e-4 * std::abs(v.tail_ratio) + 1e-300;
  v.tail_limit = v.tail_ratio <= bound;
  v.agree = v.linear == v.some_t0 && v.some_t0 == v.tail_limit;
  return v;
}

// ---------------------------------------------------------------------------
// Effective linearity

EffectiveLinearityReport check_effective_linearity(const ExtensionProblem& problem, const WeightFunction& c_tilde,
                                                   const std::vector<double>& t_grid, double tol, double eps,
                                                   double coefficient_tol) {
  const WeightFunction& c = problem.c;
  const double T = c.T();
  std::vector<double> interior;
  for (double t : t_grid)
    if (t > T) interior.push_back(t);
  if (interior.size() < 4) throw ParameterError("effective linearity needs at least 4 grid points above T");
  if (!log_derivative_margin(c, interior, 1.0 - eps).in_class)
    throw HypothesisError("weight c violates the log-derivative margin");
  if (!log_derivative_margin(c_tilde, interior, 1.0 - eps).in_class)
    throw HypothesisError("weight c~ violates the log-derivative margin");

  const GTransform g = build_g(c, default_t_max(c));
  std::vector<double> with_T{T};
  with_T.insert(with_T.end(), interior.begin(), interior.end());
  const GCurve curve = sample_curve(problem, g, with_T);
  if (!check_concavity(curve).linear) throw HypothesisError("G(.; c) is not linear on the grid");

  const MinimalIntegralResult F = minimal_integral(problem, T);
  EffectiveLinearityReport report;
  report.k_c = F.value / g.total();
  const ExtensionProblem tilde = with_weight(problem, c_tilde);
  for (double t : interior) {
    const GramSystem gram = assemble_gram(tilde, t);
    const double lhs = gram_form(gram, F.coefficients, F.coefficients).real();
    const double rhs = report.k_c * g_value(c_tilde, t);
    const MinimalIntegralResult resolved = solve_minimal(tilde, gram);
    report.t.push_back(t);
    report.lhs.push_back(lhs);
    report.rhs.push_back(rhs);
    report.resolved.push_back(resolved.value);
    const double denom = std::max(std::abs(rhs), 1e-300);
    report.max_relative_residual = std::max(report.max_relative_residual, std::abs(lhs - rhs) / denom);
    report.max_resolve_residual =
        std::max(report.max_resolve_residual, std::abs(resolved.value - lhs) / std::max(std::abs(lhs), 1e-300));
    report.max_coefficient_gap =
        std::max(report.max_coefficient_gap, (resolved.coefficients - F.coefficients).cwiseAbs().maxCoeff());
  }
  report.pass = report.max_relative_residual <= tol && report.max_resolve_residual <= tol &&
                report.max_coefficient_gap <= coefficient_tol;
  return report;
}

// ---------------------------------------------------------------------------
// Bergman restriction law

BergmanRestrictionReport bergman_restriction_check(const DomainModel& dom, const std::vector<double>& t_grid,
                                                   const std::vector<std::vector<cplx>>& samples, double tol,
                                                   int degree, const WeightFunction& c) {
  const int n = dom.dimension();
  const std::vector<cplx> origin(n, cplx(0.0));
  const BergmanKernel K0(dom, c, 0.0, degree);
  const double K0oo = K0(origin, origin).value.real();
  ExtensionProblem problem{dom, IdealSpec::maximal_power(1), Polynomial::constant(n, 1.0), c, 0};

  BergmanRestrictionReport report;
  report.statement3 = true;
  report.ill_conditioned = K0.condition_estimate() > kIllConditioned;
  double last_ratio = 0.0;
  for (double t : t_grid) {
    const BergmanKernel Kt(dom, c, t, degree);
    report.ill_conditioned = report.ill_conditioned || Kt.condition_estimate() > kIllConditioned;
    const double R = dom.sublevel_scale(t);
    double worst = 0.0;
    for (const auto& unit : samples) {
      if (static_cast<int>(unit.size()) != n) throw ParameterError("Bergman sample has the wrong dimension");
      if (!dom.contains(unit)) throw DomainError("Bergman sample lies outside the domain");
      std::vector<cplx> z = unit;
      for (int j = n - dom.pole_dimension(); j < n; ++j) z[j] *= R;
      const cplx ratio = Kt(z, origin).value / K0(z, origin).value;
      worst = std::max(worst, std::abs(ratio * std::exp(-t) - 1.0));
      ++report.samples;
    }
    const double Ktoo = Kt(origin, origin).value.real();
    const double G = minimal_integral(problem, t).value;
    const double duality = std::abs(Ktoo * G - 1.0);
    report.t.push_back(t);
    report.max_ratio_error.push_back(worst);
    report.duality_error.push_back(duality);
    report.max_ratio_error_all = std::max(report.max_ratio_error_all, worst);
    report.max_duality_error = std::max(report.max_duality_error, duality);
    if (worst > tol) report.statement3 = false;
    const double ratio_oo = Ktoo / K0oo;
    if (t > 0.0 && ratio_oo >= std::exp(t) * (1.0 - tol)) report.statement1 = true;
    last_ratio = std::exp(-t) * Ktoo;
  }
  report.statement2 = !t_grid.empty() && last_ratio >= K0oo * (1.0 - tol);
  report.pass = report.statement1 && report.statement2 && report.statement3 && report.max_duality_error <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// Layer cake and integration by parts

TestFunction TestFunction::constant(double a0) {
  if (!(a0 > 0.0)) throw ParameterError("test function must be positive");
  std::ostringstream os;
  os << "constant(" << a0 << ")";
  return {[a0](double) { return a0; }, [](double) { return 0.0; }, os.str()};
}

TestFunction TestFunction::saturating_exp(double amplitude, double rate, double offset) {
  if (!(amplitude >= 0.0 && rate > 0.0 && offset >= 0.0)) throw ParameterError("saturating_exp needs amplitude >= 0, rate > 0, offset >= 0");
  std::ostringstream os;
  os << offset << " + " << amplitude << "(1 - e^{-" << rate << " t})";
  return {[=](double t) { return offset + amplitude * (1.0 - std::exp(-rate * t)); },
          [=](double t) { return amplitude * rate * std::exp(-rate * t); }, os.str()};
}

LayerCakeOptions::LayerCakeOptions() {
  outer.tail_rel = 1e-13;
  inner.radial_order = 16;
  inner.simplex_order = 12;
  inner.free_radial_order = 24;
  inner.angular = 32;
  inner.tail_rel = 1e-13;
}

LayerCakeResult layer_cake(const DomainModel& dom, const PointIntegrand& f, const TestFunction& a, double T,
                           const LayerCakeOptions& options) {
  if (!(T >= 0.0)) throw DomainError("layer cake needs T >= 0");
  LayerCakeResult out;
  out.lhs = sublevel_volume_integral(dom, T, [&](std::span<const cplx> z, double s) { return f(z) * a.value(s); },
                                     options.outer, options.decay)
                .value;

  // m(t) at every outer node, accumulated gap by gap from the truncation point down to T.
  const double cut = radial_cutoff(T, options.decay, options.inner);
  const double outer_bp[2] = {T, cut};
  const NodeList nodes = composite_nodes(outer_bp, options.inner.radial_order, options.inner.radial_panels_per_unit);
  std::vector<double> bp{T};
  bp.insert(bp.end(), nodes.x.begin(), nodes.x.end());
  bp.push_back(cut);
  QuadratureGrid gap_grid = options.inner;
  gap_grid.radial_order = 8;
  std::vector<double> mass(bp.size(), 0.0);
  for (std::size_t k = bp.size() - 1; k-- > 0;) {
    const double gap[2] = {bp[k], bp[k + 1]};
    mass[k] = mass[k + 1] + level_integral(dom, gap, [&](std::span<const cplx> z, double) { return f(z); }, gap_grid);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double da = a.derivative(nodes.x[i]);
    if (da != 0.0) sum += nodes.w[i] * mass[i + 1] * da;
  }
  out.rhs = sum + a.value(T) * mass[0];
  const double scale = std::abs(out.lhs);
  out.residual = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : std::abs(out.rhs);
  return out;
}

IntByPartsResult int_by_parts_identity(const WeightFunction& c, const TestFunction& a, double t0) {
  if (!(t0 >= c.T())) throw DomainError("integration by parts needs t0 >= T");
  const TailBound tb = c.tail();
  if (!tb.integrable()) throw TailBoundError("weight " + c.describe() + " is not integrable");
  const double end = t0 + tail_window(tb.beta, 1e-17);
  std::vector<double> bp{t0, end};
  for (double k : c.knots())
    if (k > t0 && k < end) bp.push_back(k);
  std::sort(bp.begin(), bp.end());
  QuadOptions opts;
  opts.rel_tol = 1e-13;

  IntByPartsResult out;
  out.weighted = integrate([&](double s) { return c(s) * std::exp(-s) * a.value(s); }, bp, opts).value;
  out.parts = integrate([&](double s) { return g_value(c, s) * a.derivative(s); }, bp, opts).value;
  out.boundary = g_value(c, t0) * a.value(t0);
  out.residual = out.weighted - out.parts - out.boundary;
  out.tail_product = g_value(c, end) * a.value(end);
  out.limit_hypothesis = std::abs(out.tail_product) <= 1e-12 * std::max(1.0, std::abs(out.weighted));
  return out;
}

// ---------------------------------------------------------------------------
// Quotient monotonicity

QuotientReport quotient_monotonicity(const DomainModel& dom, const PointIntegrand& f, const TestFunction& a,
                                     const WeightFunction& c, double t0, const std::vector<double>& t_grid,
                                     double tol, const QuadratureGrid& grid) {
  const auto mass = [&](double t) {
    return sublevel_volume_integral(dom, t, [&](std::span<const cplx> z, double) { return f(z); }, grid)
        .value;
  };
  const double m0 = mass(t0);
  if (m0 == 0.0) throw ParameterError("quotient check needs a nonzero mass on the base sublevel set");
  const double g0 = g_value(c, t0);

  QuotientReport report;
  report.hypothesis_margin = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (double t : t_grid) {
    if (!(t > t0)) continue;
    const double diff = mass(t) / m0 - g_value(c, t) / g0;
    report.hypothesis_margin = std::min(report.hypothesis_margin, diff);
    max_gap = std::max(max_gap, std::abs(diff));
  }
  report.hypothesis_holds = report.hypothesis_margin >= -tol;
  report.hypothesis_equality = max_gap <= tol;

  report.lhs =
      sublevel_volume_integral(dom, t0, [&](std::span<const cplx> z, double s) { return f(z) * a.value(s); }, grid)
          .value /
      m0;
  std::vector<double> bp{t0, t0 + tail_window(c.tail().beta, 1e-17)};
  QuadOptions opts;
  opts.rel_tol = 1e-13;
  report.rhs = integrate([&](double s) { return c(s) * std::exp(-s) * a.value(s); }, bp, opts).value / g0;
  report.margin = report.lhs - report.rhs;
  report.conclusion_holds = report.margin >= -tol * std::abs(report.rhs);
  report.equality_expected = report.hypothesis_equality;
  report.equality_holds = std::abs(report.margin) <= tol * std::abs(report.rhs);
  return report;
}

// ---------------------------------------------------------------------------
// Boundary measure and optimal extension

double sphere_area(int m) {
  if (m < 0) throw ParameterError("sphere dimension must be >= 0");
  const double h = 0.5 * (m + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

BoundaryMeasureEstimate boundary_measure(const DomainModel& dom, const Polynomial& f, const std::vector<double>& t_list,
                                         double tol, bool include_phi) {
  if (dom.kind() != DomainKind::polydisc) throw ParameterError("boundary measure needs a polydisc slice model");
  if (f.variables() != dom.dimension()) throw ParameterError("boundary datum has the wrong number of variables");
  if (t_list.empty()) throw ParameterError("boundary measure needs at least one t");
  const int k = dom.pole_dimension();
  BoundaryMeasureEstimate out;
  out.codim = k;
  out.prefactor = 2.0 * k / sphere_area(2 * k - 1);
  QuadratureGrid grid;
  if (dom.reinhardt()) grid.angular = 2 * f.degree() + 2;
  for (double t : t_list) {
    const auto strip = strip_integral(
        dom, t,
        [&](std::span<const cplx> z, double s) {
          const double phi = include_phi ? dom.phi().exp_neg(z) : 1.0;
          return std::norm(f(z)) * phi * std::exp(s);
        },
        grid);
    out.t.push_back(t);
    out.estimates.push_back(out.prefactor * strip.value);
  }
  const std::size_t n = out.estimates.size();
  if (n >= 3) {
    std::vector<double> xs, ys;
    for (std::size_t i = n - 3; i < n; ++i) {
      xs.push_back(std::exp(-out.t[i] / k));
      ys.push_back(out.estimates[i]);
    }
    out.limit = neville(xs, ys, 0.0);
  } else {
    out.limit = out.estimates.back();
  }
  double drift = 0.0;
  for (std::size_t i = 1; i < n; ++i) drift = std::max(drift, std::abs(out.estimates[i] - out.estimates[i - 1]));
  out.drift = out.limit != 0.0 ? drift / std::abs(out.limit) : drift;
  out.converged = out.drift <= tol;
  return out;
}

OptimalExtensionReport optimal_extension_check(const ExtensionProblem& problem, const WeightFunction& c,
                                               const std::vector<double>& t_grid, double tol,
                                               double coefficient_tol) {
  if (problem.ideal.kind() != IdealSpec::Kind::slice) throw ParameterError("optimal extension needs a slice ideal");
  const DomainModel& dom = problem.dom;
  const int k = dom.pole_dimension();
  const ExtensionProblem unit = with_weight(problem, WeightFunction::constant());
  const ExtensionProblem weighted = with_weight(problem, c);

  OptimalExtensionReport report;
  const MinimalIntegralResult F = minimal_integral(unit, 0.0);
  report.global_norm = F.value;
  const BoundaryMeasureEstimate bm = boundary_measure(dom, problem.f, {4.0, 6.0, 8.0}, tol);
  report.boundary_value = bm.limit;
  report.global_rhs = std::pow(kPi, k) / std::tgamma(k + 1.0) * bm.limit;
  if (std::abs(report.global_norm - report.global_rhs) > tol * std::abs(report.global_rhs)) {
    std::ostringstream os;
    os << "global extension equality fails: " << report.global_norm << " vs " << report.global_rhs;
    throw HypothesisError(os.str());
  }

  for (double t : t_grid) {
    const MinimalIntegralResult Ft = minimal_integral(unit, t);
    const double expected = std::exp(-t) * report.global_norm;
    report.t.push_back(t);
    report.decay_values.push_back(Ft.value);
    const double err = expected > 0.0 ? std::abs(Ft.value - expected) / expected : std::abs(Ft.value);
    report.max_decay_error = std::max(report.max_decay_error, err);
    report.max_coefficient_gap =
        std::max(report.max_coefficient_gap, (Ft.coefficients - F.coefficients).cwiseAbs().maxCoeff());

    const MinimalIntegralResult Fc = minimal_integral(weighted, t);
    const double bound = g_value(c, t) * report.global_rhs;
    report.weighted_values.push_back(Fc.value);
    report.weighted_bounds.push_back(bound);
    const double excess = bound > 0.0 ? (Fc.value - bound) / bound : Fc.value;
    report.max_weighted_excess = std::max(report.max_weighted_excess, excess);
    report.max_weighted_gap = std::max(report.max_weighted_gap, std::abs(excess));
  }
  report.pass = report.max_decay_error <= tol && report.max_coefficient_gap <= coefficient_tol &&
                report.max_weighted_excess <= tol;
  return report;
}

}  // namespace minl2

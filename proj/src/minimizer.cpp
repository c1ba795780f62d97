#include "minl2/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace minl2 {

// ---------------------------------------------------------------------------
// Ideals and problems

IdealSpec IdealSpec::maximal_power(int k) {
  if (k < 1) throw ParameterError("ideal order must be >= 1");
  return IdealSpec(Kind::maximal_power, k);
}

IdealSpec IdealSpec::slice(int codim) {
  if (codim < 1) throw ParameterError("slice codimension must be >= 1");
  return IdealSpec(Kind::slice, codim);
}

bool IdealSpec::pins(const MultiIndex& alpha) const {
  if (kind_ == Kind::maximal_power) return total_degree(alpha) < order_;
  const int n = static_cast<int>(alpha.size());
  for (int j = std::max(0, n - order_); j < n; ++j)
    if (alpha[j] != 0) return false;
  return true;
}

bool IdealSpec::contains(const Polynomial& difference) const {
  for (const auto& [alpha, coeff] : difference.terms())
    if (pins(alpha) && coeff != cplx(0.0)) return false;
  return true;
}

std::string IdealSpec::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::maximal_power)
    os << "maximal ideal power " << order_;
  else
    os << "slice ideal, codimension " << order_;
  return os.str();
}

void validate(const ExtensionProblem& problem) {
  const int n = problem.dom.dimension();
  if (problem.f.variables() != n) throw ParameterError("datum f has the wrong number of variables");
  if (problem.basis_degree < 0) throw ParameterError("basis degree must be >= 0");
  if (problem.ideal.kind() == IdealSpec::Kind::maximal_power && problem.basis_degree < problem.ideal.order() - 1)
    throw ParameterError("basis degree must be at least ideal order - 1");
  if (problem.ideal.kind() == IdealSpec::Kind::slice && problem.ideal.order() > n)
    throw ParameterError("slice codimension exceeds the dimension");
  bool jet_nonzero = false;
  for (const auto& [alpha, coeff] : problem.f.terms())
    if (problem.ideal.pins(alpha) && coeff != cplx(0.0)) jet_nonzero = true;
  if (!jet_nonzero && !problem.allow_zero_datum)
    throw ParameterError("datum has a zero jet; set allow_zero_datum for the degenerate problem");
}

// ---------------------------------------------------------------------------
// Gram assembly

namespace {

double lower_limit(const WeightFunction& c) { return std::max(0.0, c.T()); }

std::vector<double> s_breakpoints(const WeightFunction& c, double lo, double hi,
                                  std::initializer_list<double> extra = {}) {
  std::vector<double> bp{lo, hi};
  for (double k : c.knots())
    if (k > lo && k < hi) bp.push_back(k);
  for (double e : extra)
    if (e > lo && e < hi) bp.push_back(e);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

double tail_decay(const WeightFunction& c) {
  const TailBound tb = c.tail();
  if (!tb.integrable()) throw TailBoundError("weight " + c.describe() + " is not integrable");
  return tb.beta;
}

CMatrix gram_at(const ExtensionProblem& problem, const std::vector<MultiIndex>& basis, double t,
                const QuadratureGrid& grid, bool diagonal) {
  const DomainModel& dom = problem.dom;
  const WeightFunction& c = problem.c;
  const int d = problem.basis_degree;
  const auto bp = s_breakpoints(c, t, radial_cutoff(t, tail_decay(c), grid));
  const Eigen::Index size = static_cast<Eigen::Index>(basis.size());
  std::vector<cplx> m;
  if (diagonal) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(size);
    visit_level_nodes(dom, bp, grid, true, [&](std::span<const cplx> z, double s, double w) {
      const double weight = w * dom.phi().exp_neg(z) * c(s);
      evaluate_monomials(basis, z, d, m);
      for (Eigen::Index a = 0; a < size; ++a) diag[a] += weight * std::norm(m[a]);
    });
    return diag.cast<cplx>().asDiagonal();
  }
  CMatrix M = CMatrix::Zero(size, size);
  CVector v(size);
  visit_level_nodes(dom, bp, grid, false, [&](std::span<const cplx> z, double s, double w) {
    const double weight = w * dom.phi().exp_neg(z) * c(s);
    evaluate_monomials(basis, z, d, m);
    for (Eigen::Index a = 0; a < size; ++a) v[a] = std::conj(m[a]);
    M.selfadjointView<Eigen::Lower>().rankUpdate(v, weight);
  });
  return M.selfadjointView<Eigen::Lower>();
}

struct ScaledLdlt {
  Eigen::VectorXd scale;  // 1 / sqrt(M_aa)
  Eigen::LDLT<CMatrix> ldlt;
  double min_pivot = 0.0;
  double condition = 1.0;
};

ScaledLdlt factor(const CMatrix& M) {
  ScaledLdlt out;
  const Eigen::Index size = M.rows();
  out.scale.resize(size);
  for (Eigen::Index a = 0; a < size; ++a) {
    const double diag = M(a, a).real();
    if (!(diag > 0.0) || !std::isfinite(diag))
      throw SingularityError("Gram matrix has a nonpositive diagonal entry; quadrature breakdown");
    out.scale[a] = 1.0 / std::sqrt(diag);
  }
  if (size == 0) return out;
  const CMatrix S = out.scale.asDiagonal() * M * out.scale.asDiagonal();
  out.ldlt.compute(S);
  if (out.ldlt.info() != Eigen::Success) throw SingularityError("Gram factorization failed");
  out.min_pivot = out.ldlt.vectorD().real().minCoeff();
  if (!(out.min_pivot > 0.0)) throw SingularityError("Gram matrix is not positive definite");
  const double rc = out.ldlt.rcond();
  out.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

GramSystem assemble_gram(const ExtensionProblem& problem, double t) {
  validate(problem);
  if (!(t >= lower_limit(problem.c))) throw DomainError("Gram assembly needs t >= max(0, T)");
  GramSystem gram;
  gram.t = t;
  gram.basis = monomials_up_to(problem.dom.dimension(), problem.basis_degree);
  gram.diagonal = problem.dom.reinhardt();
  for (const auto& alpha : gram.basis) gram.pinned.push_back(problem.ideal.pins(alpha) ? 1 : 0);

  const CMatrix coarse = gram_at(problem, gram.basis, t, problem.grid, gram.diagonal);
  gram.matrix = gram_at(problem, gram.basis, t, problem.grid.refined(), gram.diagonal);

  const Eigen::Index size = gram.matrix.rows();
  double change = 0.0;
  double herm = 0.0;
  double peak = 0.0;
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = 0; b < size; ++b) {
      const double scale = std::sqrt(std::abs(gram.matrix(a, a).real() * gram.matrix(b, b).real()));
      const double diff = std::abs(gram.matrix(a, b) - coarse(a, b));
      change = std::max(change, scale > 0.0 ? diff / scale : diff);
      herm = std::max(herm, std::abs(gram.matrix(a, b) - std::conj(gram.matrix(b, a))));
      peak = std::max(peak, std::abs(gram.matrix(a, b)));
    }
  }
  gram.refinement_error = change;
  gram.hermitian_error = peak > 0.0 ? herm / peak : 0.0;
  if (change > problem.grid.refine_tol) {
    std::ostringstream os;
    os << "Gram matrix at t=" << t << " changes by " << change << " between resolutions";
    throw RefinementError(os.str());
  }
  gram.min_pivot = factor(gram.matrix).min_pivot;
  return gram;
}

// ---------------------------------------------------------------------------
// Constrained solve

namespace {

struct SubSolve {
  bool feasible = true;
  double value = 0.0;
  CVector coefficients;
  double condition = 1.0;
  double min_pivot = 0.0;
};

SubSolve solve_prefix(const ExtensionProblem& problem, const GramSystem& gram, int degree) {
  SubSolve out;
  std::vector<Eigen::Index> free_idx;
  std::vector<Eigen::Index> pin_idx;
  Eigen::Index size = 0;
  for (std::size_t a = 0; a < gram.basis.size(); ++a) {
    if (total_degree(gram.basis[a]) > degree) break;
    ++size;
    (gram.pinned[a] ? pin_idx : free_idx).push_back(static_cast<Eigen::Index>(a));
  }
  for (const auto& [alpha, coeff] : problem.f.terms())
    if (problem.ideal.pins(alpha) && total_degree(alpha) > degree && coeff != cplx(0.0)) {
      out.feasible = false;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }

  const CMatrix M = gram.matrix.topLeftCorner(size, size);
  out.coefficients = CVector::Zero(size);
  CVector pinned_values(pin_idx.size());
  for (std::size_t i = 0; i < pin_idx.size(); ++i) {
    pinned_values[i] = problem.f.coefficient(gram.basis[pin_idx[i]]);
    out.coefficients[pin_idx[i]] = pinned_values[i];
  }

  const ScaledLdlt whole = factor(M);
  out.condition = whole.condition;
  out.min_pivot = whole.min_pivot;

  if (!free_idx.empty() && pinned_values.squaredNorm() > 0.0) {
    const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
    CMatrix MFF(nf, nf);
    CVector rhs = CVector::Zero(nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
      for (Eigen::Index j = 0; j < nf; ++j) MFF(i, j) = M(free_idx[i], free_idx[j]);
      for (std::size_t p = 0; p < pin_idx.size(); ++p) rhs[i] -= M(free_idx[i], pin_idx[p]) * pinned_values[p];
    }
    const ScaledLdlt block = factor(MFF);
    const CVector y = block.ldlt.solve(block.scale.asDiagonal() * rhs);
    const CVector x = block.scale.asDiagonal() * y;
    for (Eigen::Index i = 0; i < nf; ++i) out.coefficients[free_idx[i]] = x[i];
  }
  out.value = std::max(0.0, out.coefficients.dot(M * out.coefficients).real());
  return out;
}

}  // namespace

MinimalIntegralResult solve_minimal(const ExtensionProblem& problem, const GramSystem& gram) {
  MinimalIntegralResult result;
  result.t = gram.t;
  result.basis = gram.basis;
  result.basis_degree = problem.basis_degree;
  result.diagonal = gram.diagonal;

  const SubSolve top = solve_prefix(problem, gram, problem.basis_degree);
  result.feasible = top.feasible;
  result.value = top.value;
  result.coefficients = top.feasible ? top.coefficients : CVector::Zero(gram.basis.size());
  result.condition_estimate = top.condition;
  result.min_pivot = top.min_pivot;
  if (!top.feasible) {
    result.converged = false;
    return result;
  }

  const int lowest = problem.ideal.kind() == IdealSpec::Kind::maximal_power ? problem.ideal.order() - 1 : 0;
  if (problem.basis_degree - 1 >= lowest) {
    const SubSolve below = solve_prefix(problem, gram, problem.basis_degree - 1);
    if (below.feasible) {
      result.degree_change = std::abs(below.value - top.value);
      result.converged = result.degree_change <= kDegreeTolerance * std::max(top.value, 1e-300) ||
                         result.degree_change == 0.0;
    }
  }
  return result;
}

MinimalIntegralResult minimal_integral(const ExtensionProblem& problem, double t) {
  return solve_minimal(problem, assemble_gram(problem, t));
}

Polynomial MinimalIntegralResult::minimizer(int n) const {
  Polynomial p(n);
  for (std::size_t a = 0; a < basis.size(); ++a) p.add(basis[a], coefficients[static_cast<Eigen::Index>(a)]);
  return p;
}

cplx gram_form(const GramSystem& gram, const CVector& x, const CVector& y) { return x.dot(gram.matrix * y); }

// ---------------------------------------------------------------------------
// Bergman kernel

BergmanKernel::BergmanKernel(const DomainModel& dom, const WeightFunction& c, double t, int degree,
                             const QuadratureGrid& grid)
    : dom_(dom), t_(t), degree_(degree) {
  const int n = dom.dimension();
  ExtensionProblem problem{dom, IdealSpec::maximal_power(1), Polynomial::constant(n, 1.0), c, degree, false, grid};
  const GramSystem gram = assemble_gram(problem, t);
  basis_ = gram.basis;
  ScaledLdlt fac = factor(gram.matrix);
  scale_ = fac.scale;
  ldlt_ = std::move(fac.ldlt);
  condition_ = fac.condition;
}

BergmanEvaluation BergmanKernel::operator()(std::span<const cplx> z, std::span<const cplx> w) const {
  const int n = dom_.dimension();
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != n)
    throw ParameterError("Bergman kernel: points have the wrong dimension");
  if (!dom_.in_sublevel(z, t_) || !dom_.in_sublevel(w, t_))
    throw DomainError("Bergman kernel: evaluation points must lie in D_t");
  std::vector<cplx> mz, mw;
  evaluate_monomials(basis_, z, degree_, mz);
  evaluate_monomials(basis_, w, degree_, mw);
  const Eigen::Index size = static_cast<Eigen::Index>(basis_.size());
  CVector rhs(size);
  for (Eigen::Index a = 0; a < size; ++a) rhs[a] = std::conj(mw[a]) * scale_[a];
  const CVector x = ldlt_.solve(rhs);

  BergmanEvaluation out;
  out.t = t_;
  out.z.assign(z.begin(), z.end());
  out.w.assign(w.begin(), w.end());
  out.value = 0.0;
  for (Eigen::Index a = 0; a < size; ++a) out.value += mz[a] * scale_[a] * x[a];
  out.condition_estimate = condition_;
  out.ill_conditioned = condition_ > kIllConditioned;
  return out;
}

BergmanEvaluation bergman_kernel(const DomainModel& dom, const WeightFunction& c, double t, int degree,
                                 std::span<const cplx> z, std::span<const cplx> w, const QuadratureGrid& grid) {
  return BergmanKernel(dom, c, t, degree, grid)(z, w);
}

// ---------------------------------------------------------------------------
// Pythagoras identity

std::vector<CVector> random_ideal_perturbations(const GramSystem& gram, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index size = gram.matrix.rows();
  std::vector<CVector> out;
  for (int k = 0; k < count; ++k) {
    CVector h = CVector::Zero(size);
    for (Eigen::Index a = 0; a < size; ++a) {
      if (gram.pinned[a]) continue;
      h[a] = cplx(normal(rng), normal(rng)) / std::sqrt(gram.matrix(a, a).real());
    }
    out.push_back(std::move(h));
  }
  return out;
}

PythagorasReport verify_pythagoras(const GramSystem& gram, const MinimalIntegralResult& result,
                                   const std::vector<CVector>& perturbations) {
  if (!result.feasible) throw ParameterError("Pythagoras check needs a feasible minimizer");
  PythagorasReport report;
  const CVector& F = result.coefficients;
  const double nF = gram_form(gram, F, F).real();
  for (const CVector& h : perturbations) {
    if (h.size() != F.size()) throw ParameterError("perturbation has the wrong length");
    for (Eigen::Index a = 0; a < h.size(); ++a)
      if (gram.pinned[a] && h[a] != cplx(0.0)) throw ParameterError("perturbation is not in the ideal");
    const CVector Fh = F + h;
    const double lhs = nF + gram_form(gram, h, h).real();
    const double rhs = gram_form(gram, Fh, Fh).real();
    const double scale = std::max(std::abs(rhs), std::abs(lhs));
    report.max_residual = std::max(report.max_residual, scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0);
    ++report.perturbations;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Extension inequality

ExtensionInequalityReport verify_extension_inequality(const ExtensionProblem& problem, double t0, double B) {
  const double T = lower_limit(problem.c);
  if (!(t0 >= T)) throw ParameterError("extension inequality: t0 must be >= max(0, T)");
  const CutoffProfile profile(t0, B);
  const MinimalIntegralResult F = minimal_integral(problem, t0);

  ExtensionInequalityReport report;
  report.t0 = t0;
  report.B = B;
  report.mass = weighted_mass(problem.c, T, t0 + B);
  if (!F.feasible) return report;

  const DomainModel& dom = problem.dom;
  const WeightFunction& c = problem.c;
  const int d = problem.basis_degree;
  const auto& basis = F.basis;
  std::vector<Eigen::Index> free_idx;
  for (std::size_t a = 0; a < basis.size(); ++a)
    if (!problem.ideal.pins(basis[a])) free_idx.push_back(static_cast<Eigen::Index>(a));
  const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());

  QuadratureGrid grid = problem.grid;
  if (dom.reinhardt()) grid.angular = 2 * d + 2;

  std::vector<cplx> m;
  auto eval_poly = [&](const CVector& coeffs) {
    cplx sum = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a) sum += coeffs[static_cast<Eigen::Index>(a)] * m[a];
    return sum;
  };
  CVector pinned_part = CVector::Zero(F.coefficients.size());
  for (std::size_t a = 0; a < basis.size(); ++a)
    if (problem.ideal.pins(basis[a])) pinned_part[a] = F.coefficients[a];

  // Strip constant.
  {
    const double bp[2] = {t0, t0 + B};
    double strip = 0.0;
    visit_level_nodes(dom, bp, grid, false, [&](std::span<const cplx> z, double s, double w) {
      evaluate_monomials(basis, z, d, m);
      strip += w * std::exp(s) * std::norm(eval_poly(F.coefficients)) * dom.phi().exp_neg(z);
    });
    report.constant = strip / B;
  }

  // Least squares for h = F~ - (pinned part): minimize int |h + r|^2 W with
  // r = P - (1 - b(psi)) F, which vanishes to the ideal's order at the pole.
  const int vanishing = problem.ideal.kind() == IdealSpec::Kind::maximal_power ? problem.ideal.order() : 1;
  const double decay = std::min(tail_decay(c), static_cast<double>(vanishing) / dom.pole_dimension());
  const double upper = radial_cutoff(std::max(t0 + B, T), decay, grid);
  const auto bp = s_breakpoints(c, T, upper, {t0, t0 + B});
  CMatrix M = CMatrix::Zero(nf, nf);
  CVector y = CVector::Zero(nf);
  CVector v(nf);
  double rr = 0.0;
  visit_level_nodes(dom, bp, grid, false, [&](std::span<const cplx> z, double s, double w) {
    const double psi = -s;
    const double vpsi = profile.v(psi);
    const double weight = w * dom.phi().exp_neg(z) * std::exp(s + vpsi) * c(-vpsi);
    evaluate_monomials(basis, z, d, m);
    const cplx r = eval_poly(pinned_part) - (1.0 - profile.b(psi)) * eval_poly(F.coefficients);
    for (Eigen::Index i = 0; i < nf; ++i) v[i] = std::conj(m[free_idx[i]]);
    M.selfadjointView<Eigen::Lower>().rankUpdate(v, weight);
    y += (weight * r) * v;
    rr += weight * std::norm(r);
  });
  M = M.selfadjointView<Eigen::Lower>();

  report.extension = pinned_part;
  double lhs = rr;
  if (nf > 0) {
    const ScaledLdlt fac = factor(M);
    const CVector h = fac.scale.asDiagonal() * fac.ldlt.solve(fac.scale.asDiagonal() * (-y));
    lhs = rr + h.dot(M * h).real() + 2.0 * h.dot(y).real();
    for (Eigen::Index i = 0; i < nf; ++i) report.extension[free_idx[i]] += h[i];
  }
  report.lhs = std::max(0.0, lhs);
  report.rhs = report.constant * report.mass;
  report.pass = report.lhs <= report.rhs * (1.0 + 1e-10) + 1e-300;
  return report;
}

}  // namespace minl2

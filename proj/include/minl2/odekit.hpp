#pragma once

// Closed-form solution of the (u, s) ODE system, cutoff profiles b and v,
// the smoothed cutoff family v_eps and the regularized maximum M_eps.

#include <span>
#include <vector>

#include "minl2/weightlab.hpp"

namespace minl2 {

/// u(t) = -log A(t), s(t) = Q(t) / A(t) where A(t) = int_T^t c e^{-s} and
/// Q(t) = int_T^t A. All derivatives come from A' = c e^{-t}, A'' = (c' - c) e^{-t}
/// and the quotient rule.
class OdeSolution {
 public:
  explicit OdeSolution(WeightFunction weight);

  struct Jet {
    double t;
    double A, dA, d2A;  // A, A', A''
    double Q;
    double u, du, d2u;
    double s, ds, d2s;
  };

  /// Throws SingularityError when A(t) underflows (t too close to T).
  Jet at(double t) const;

  double u(double t) const { return at(t).u; }
  double s(double t) const { return at(t).s; }
  /// lim_{t->inf} u(t) = -log int_T^inf c e^{-s}.
  double u_limit() const;

  const WeightFunction& weight() const { return weight_; }
  /// Smallest offset above T where A(t) is still resolvable.
  double left_margin() const { return left_margin_; }

 private:
  WeightFunction weight_;
  double left_margin_;
};

/// Pre: the weight is in C_T on the working grid (checked by callers that
/// need it; solve_gz itself only needs integrability).
OdeSolution solve_gz(const WeightFunction& c);

struct GzResidualRow {
  double t;
  double res1;     // |(s + s'^2/(u''s - s'')) e^{u-t} c - 1|
  double res2;     // |s' - s u' - 1|
  double min_pos;  // u''s - s''
  double s;
};

struct GzResidualReport {
  std::vector<GzResidualRow> rows;
  double max_res1 = 0.0;
  double max_res2 = 0.0;
  double min_positivity = 0.0;  // min of u''s - s''
  double min_s = 0.0;
  std::vector<double> skipped;  // nodes inside the singular margin near T
};

/// Throws SingularityError if u''s - s'' <= 0 at a resolvable grid node.
GzResidualReport verify_gz_residuals(const OdeSolution& sol, std::span<const double> grid);

/// b(t) = int_{-inf}^t (1/B) 1_{(-t0-B, -t0)}, v(t) = int_0^t b.
class CutoffProfile {
 public:
  CutoffProfile(double t0, double B);
  double t0() const { return t0_; }
  double B() const { return B_; }
  double b(double t) const;
  double v(double t) const;

 private:
  double t0_;
  double B_;
};

CutoffProfile make_cutoff(double t0, double B);

/// The fixed bump rho(t) = N exp(-1/(1-t^2)) on (-1, 1) and its partial moments.
class Bump {
 public:
  static const Bump& instance();

  double density(double x) const;
  /// int_{-1}^{x} rho.
  double cdf(double x) const;
  /// int_{-1}^{x} y rho(y) dy.
  double first_moment(double x) const;
  /// int_{-1}^{x} y^2 rho(y) dy.
  double second_moment(double x) const;
  double normalization() const { return norm_; }
  double variance() const { return m2_; }

 private:
  Bump();
  double partial(double x, int power) const;
  double norm_;
  double m2_;
};

/// rho_eps(t) = rho(t/eps)/eps.
class Mollifier {
 public:
  explicit Mollifier(double eps);
  double eps() const { return eps_; }
  double operator()(double t) const;
  /// int_{-inf}^t rho_eps.
  double cdf(double t) const;

 private:
  double eps_;
};

/// v_eps from the double antiderivative of (1/(B-4eps)) 1_{(-t0-B+2eps, -t0-2eps)} * rho_{eps/4},
/// normalized by v_eps(0) = 0.
class SmoothedCutoff {
 public:
  SmoothedCutoff(double t0, double B, double eps);
  double t0() const { return t0_; }
  double B() const { return B_; }
  double eps() const { return eps_; }

  double v(double t) const;
  double dv(double t) const;
  double d2v(double t) const;

 private:
  double primitive(double t) const;  // int_{-inf}^t v'
  double t0_, B_, eps_;
  double left_, right_, delta_, scale_;
};

/// Throws ParameterError unless B > 0 and 0 < eps < B/8.
SmoothedCutoff make_smoothed_cutoff(double t0, double B, double eps);

/// M_eps(x, y) = (max * (rho_eps x rho_eps))(x, y).
class MaxSmoother {
 public:
  explicit MaxSmoother(double eps, int panels = 16, int order = 32);
  double eps() const { return eps_; }
  double operator()(double x, double y) const;
  /// C_rho = iint |max(s,t)| rho(s) rho(t) over the unit square: sup |M_eps - max| <= eps C_rho.
  static double gap_constant();

 private:
  double eps_;
  NodeList outer_;
};

MaxSmoother make_max_smoother(double eps);

}  // namespace minl2

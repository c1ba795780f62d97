#pragma once

// Checks on sampled G-curves and the identities around them.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minl2/minimizer.hpp"

namespace minl2 {

/// G sampled on a t-grid together with r = g(t).
struct GCurve {
  std::vector<double> t;
  std::vector<double> r;
  std::vector<double> G;
  std::vector<char> converged;
  double total = 0.0;  // g(T)
  double T = 0.0;

  std::size_t size() const { return t.size(); }
};

/// Builds a curve from precomputed values (t strictly increasing).
GCurve make_curve(const GTransform& g, std::vector<double> t, std::vector<double> G);
/// Solves minimal_integral at every t.
GCurve sample_curve(const ExtensionProblem& problem, const GTransform& g, const std::vector<double>& t_grid);
/// Solves minimal_integral at t = g^{-1}(r) for every r.
GCurve sample_curve_r(const ExtensionProblem& problem, const GTransform& g, const std::vector<double>& r_grid);

enum class ConcavityVerdict { linear, strictly_concave, concave, violated };
std::string to_string(ConcavityVerdict verdict);

struct ConcavityReport {
  ConcavityVerdict verdict = ConcavityVerdict::violated;
  bool concave = false;
  bool linear = false;
  /// Largest G(r_{i+1}) - 2G(r_i) + G(r_{i-1}) normalized to the local spacing
  /// (divided difference times h_i^2), in increasing r.
  double max_second_difference = 0.0;
  std::vector<double> second_differences;  // ordered by increasing r
  std::vector<double> r_mid;               // r_i of each second difference
  std::optional<double> witness_r;         // first r with a positive violation
  std::optional<double> k_c;               // G(T)/g(T) when linear
  double tolerance = 0.0;                  // absolute tolerance actually used
  double slope_gap = 0.0;                  // |first chord slope - last chord slope|
};

/// tol is relative to max |G|.
ConcavityReport check_concavity(const GCurve& curve, double tol = 1e-8);

struct MonotoneReport {
  bool nonincreasing = false;
  bool decays = false;
  bool pass = false;
  double decay_ratio = 0.0;  // G(t_last) / G(t_first)
  std::optional<double> witness_t;
};

MonotoneReport check_monotone_limits(const GCurve& curve, double decay_tolerance = 1e-4);

struct LinearityVerdict {
  bool linear = false;           // statement (1)
  bool some_t0 = false;          // statement (2)
  bool tail_limit = false;       // statement (3)
  bool agree = false;
  double k_c = 0.0;              // G(T)/g(T)
  double min_interior_ratio = 0.0;
  std::optional<double> t0_witness;
  double tail_ratio = 0.0;       // extrapolated lim G/g
  bool extrapolation_stable = true;
};

/// Needs t_0 == T as first curve point.
LinearityVerdict check_linearity_equivalence(const GCurve& curve, double tol = 1e-6);

struct EffectiveLinearityReport {
  double k_c = 0.0;
  std::vector<double> t;
  std::vector<double> lhs;           // int c~(-psi) |F|^2 e^{-phi}
  std::vector<double> rhs;           // k_c int_t^inf c~ e^{-s}
  std::vector<double> resolved;      // G(t; c~)
  double max_relative_residual = 0.0;
  double max_resolve_residual = 0.0;  // |G(t;c~) - lhs| / lhs
  double max_coefficient_gap = 0.0;   // |F(c~, t) - F(c, T)|
  bool pass = false;
};

/// Throws HypothesisError when a log-derivative margin fails or G(.; c) is not linear.
EffectiveLinearityReport check_effective_linearity(const ExtensionProblem& problem, const WeightFunction& c_tilde,
                                                   const std::vector<double>& t_grid, double tol = 1e-6,
                                                   double eps = 1e-3, double coefficient_tol = 1e-8);

struct BergmanRestrictionReport {
  std::vector<double> t;
  std::vector<double> max_ratio_error;   // per t: max |K_t(z,o)/K(z,o) e^{-t} - 1|
  std::vector<double> duality_error;     // per t: |K_t(o,o) G(t) - 1|
  double max_ratio_error_all = 0.0;
  double max_duality_error = 0.0;
  bool statement1 = false;  // K_t0(o,o)/K(o,o) >= e^{t0} for some t0
  bool statement2 = false;  // liminf e^{-t} K_t(o,o) >= K(o,o)
  bool statement3 = false;  // ratio law on every sample
  bool pass = false;
  bool ill_conditioned = false;
  int samples = 0;
};

/// Sample points are given in D and scaled into D_t along the pole coordinates.
BergmanRestrictionReport bergman_restriction_check(const DomainModel& dom, const std::vector<double>& t_grid,
                                                   const std::vector<std::vector<cplx>>& samples, double tol = 1e-6,
                                                   int degree = 2, const WeightFunction& c = WeightFunction::constant());

/// Positive increasing test function a(t) with its derivative.
struct TestFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string name;

  static TestFunction constant(double a0);
  /// a(t) = offset + amplitude (1 - e^{-rate t}).
  static TestFunction saturating_exp(double amplitude, double rate, double offset = 0.0);
};

struct LayerCakeResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs| / |lhs| (absolute when lhs == 0)
};

struct LayerCakeOptions {
  QuadratureGrid outer{};
  QuadratureGrid inner{};
  double decay = 1.0;   // s-decay rate of the level density of f
  LayerCakeOptions();
};

/// lhs = int_{psi<-T} f a(-psi), rhs = int_T^inf m(t) a'(t) dt + a(T) m(T), m(t) = int_{psi<-t} f.
LayerCakeResult layer_cake(const DomainModel& dom, const PointIntegrand& f, const TestFunction& a, double T,
                           const LayerCakeOptions& options = {});

struct IntByPartsResult {
  double weighted = 0.0;   // int_{t0}^inf c e^{-s} a
  double parts = 0.0;      // int_{t0}^inf g a'
  double boundary = 0.0;   // g(t0) a(t0)
  double residual = 0.0;   // weighted - parts - boundary
  double tail_product = 0.0;  // g(t) a(t) at the truncation point
  bool limit_hypothesis = false;
};

IntByPartsResult int_by_parts_identity(const WeightFunction& c, const TestFunction& a, double t0);

struct QuotientReport {
  bool hypothesis_holds = false;
  bool hypothesis_equality = false;
  double hypothesis_margin = 0.0;  // min over grid of m(t)/m(t0) - g(t)/g(t0)
  double lhs = 0.0;                // int_{psi<-t0} f a(-psi) / m(t0)
  double rhs = 0.0;                // int_{t0}^inf c e^{-s} a / g(t0)
  double margin = 0.0;             // lhs - rhs
  bool conclusion_holds = false;
  bool equality_expected = false;
  bool equality_holds = false;
};

/// Throws ParameterError when int_{psi<-t0} f vanishes.
QuotientReport quotient_monotonicity(const DomainModel& dom, const PointIntegrand& f, const TestFunction& a,
                                     const WeightFunction& c, double t0, const std::vector<double>& t_grid,
                                     double tol = 1e-8, const QuadratureGrid& grid = {});

struct BoundaryMeasureEstimate {
  std::vector<double> t;
  std::vector<double> estimates;
  double limit = 0.0;
  double prefactor = 0.0;  // 2k / sigma_{2k-1}
  int codim = 0;
  double drift = 0.0;      // max |estimate_i - estimate_{i-1}| / |limit|
  bool converged = false;
};

/// sigma_m: area of the unit sphere S^m.
double sphere_area(int m);

/// Strip estimates (2k/sigma_{2k-1}) int |f|^2 e^{-phi-psi} 1_{-1-t<psi<-t} on a slice model.
BoundaryMeasureEstimate boundary_measure(const DomainModel& dom, const Polynomial& f, const std::vector<double>& t_list,
                                         double tol = 1e-6, bool include_phi = true);

struct OptimalExtensionReport {
  double global_norm = 0.0;      // int_M |F|^2 e^{-phi}
  double boundary_value = 0.0;   // int_X |f|^2 e^{-phi} dV_M[psi]
  double global_rhs = 0.0;       // pi^k / k! * boundary_value
  std::vector<double> t;
  std::vector<double> decay_values;   // G(t; 1)
  std::vector<double> weighted_values;  // G(t; c)
  std::vector<double> weighted_bounds;  // g_c(t) * global_rhs
  double max_decay_error = 0.0;         // relative to e^{-t} global_norm
  double max_coefficient_gap = 0.0;     // F_t vs F restricted
  double max_weighted_excess = 0.0;     // (G(t;c) - bound) / bound, <= 0 when the bound holds
  double max_weighted_gap = 0.0;        // |G(t;c) - bound| / bound
  bool pass = false;
};

/// Slice model with ideal of X; throws HypothesisError when the global
/// equality fails beyond tol.
OptimalExtensionReport optimal_extension_check(const ExtensionProblem& problem, const WeightFunction& c,
                                               const std::vector<double>& t_grid, double tol = 1e-3,
                                               double coefficient_tol = 1e-8);

}  // namespace minl2

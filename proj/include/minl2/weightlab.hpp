#pragma once

// Weight functions c(t) on (T, inf), membership tests for the admissible
// classes, and the g-transform g(t) = int_t^inf c(s) e^{-s} ds.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minl2/quadrature.hpp"

namespace minl2 {

enum class WeightFamily { constant, exp_rate, rational, tabulated };

std::string to_string(WeightFamily family);

/// Declared envelope c(s) e^{-s} <= c0 * e^{-beta s} for s >= T.
/// beta <= 0 means no integrable envelope is known.
struct TailBound {
  double c0 = 1.0;
  double beta = 1.0;

  bool integrable() const { return beta > 0.0; }
  /// Upper bound for int_{t}^{inf} c(s) e^{-s} ds.
  double remainder(double t) const;
};

/// A positive smooth weight c on (T, inf). Immutable value type.
class WeightFunction {
 public:
  /// c(t) = value.
  static WeightFunction constant(double value = 1.0, double T = 0.0);
  /// c(t) = e^{alpha t}.
  static WeightFunction exp_rate(double alpha, double T = 0.0);
  /// c(t) = 1 / (1 + a t^2), a >= 0.
  static WeightFunction rational(double a = 1.0, double T = 0.0);
  /// Monotone cubic (Fritsch-Carlson) through (t_i, c_i); T = t_0. Beyond the
  /// last node the weight is continued by its last value.
  static WeightFunction tabulated(std::vector<double> t, std::vector<double> c);
  /// Reads a `t,c` CSV (header required, strictly increasing t).
  static WeightFunction from_csv(const std::string& path);

  double T() const { return T_; }
  WeightFamily family() const { return family_; }
  /// alpha for exp_rate, a for rational, the value for constant.
  double parameter() const { return param_; }

  /// c(t); throws DomainError for t < T and EvaluationError if c(t) <= 0.
  double operator()(double t) const;
  double derivative(double t) const;
  /// c'(t) / c(t).
  double log_derivative(double t) const { return derivative(t) / (*this)(t); }

  TailBound tail() const;
  /// Analytic liminf_{t->inf} c(t) when the family determines it.
  std::optional<double> liminf() const;

  std::string describe() const;
  /// Interpolation knots of a tabulated weight (empty otherwise).
  std::span<const double> knots() const { return knots_; }

  /// Closed form of int_t^inf c e^{-s} ds when the family has one.
  std::optional<double> closed_form_tail_integral(double t) const;

 private:
  WeightFunction() = default;
  double eval_unchecked(double t) const;

  WeightFamily family_ = WeightFamily::constant;
  double param_ = 1.0;
  double T_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// int_a^b c(s) e^{-s} ds by adaptive composite Gauss-Legendre.
double weighted_mass(const WeightFunction& c, double a, double b, const QuadOptions& opts = {});

/// int_t^inf c(s) e^{-s} ds, truncated at max(t_end, t + tail window).
double weighted_tail(const WeightFunction& c, double t, double t_end = 0.0, const QuadOptions& opts = {});

struct ConditionFlag {
  std::string name;
  bool holds = false;
  std::optional<double> witness;  // grid point where the condition fails
  double measured = 0.0;          // the quantity the condition was judged on
};

struct ClassReport {
  bool in_class = false;
  std::vector<ConditionFlag> conditions;
  std::optional<double> witness;  // first failing witness, if any
  /// Grid points where both sides of a strict inequality vanish within tolerance.
  std::vector<double> indeterminate;
  double tolerance = 0.0;

  const ConditionFlag* find(const std::string& name) const;
};

inline constexpr double kMonotoneTol = 1e-12;
inline constexpr double kStrictTol = 1e-12;

/// Class P_T with the phi == 0 form of condition (3): liminf c > liminf_floor.
ClassReport check_class_P(const WeightFunction& c, std::span<const double> grid, double liminf_floor = 1e-8);

/// Class C_T inequality (int_T^t c e^{-s})^2 > c(t) e^{-t} int_T^t int_T^{t2} c e^{-s} at every grid point.
ClassReport check_class_C(const WeightFunction& c, std::span<const double> grid);

/// c'(t)/c(t) < bound at every grid point.
ClassReport log_derivative_margin(const WeightFunction& c, std::span<const double> grid, double bound);

/// g(t) = int_t^inf c(s) e^{-s} ds and its inverse.
class GTransform {
 public:
  GTransform(WeightFunction weight, double t_max, int nodes_per_unit);

  const WeightFunction& weight() const { return weight_; }
  double total() const { return total_; }
  double t_max() const { return t_max_; }

  double operator()(double t) const;
  /// g'(t) = -c(t) e^{-t}.
  double derivative(double t) const;
  /// t with g(t) = r, r in (0, total]; bisection to ~1e-14 relative in t.
  double inverse(double r) const;

 private:
  WeightFunction weight_;
  double t_max_;
  QuadOptions opts_;
  double total_;
};

/// Remainder tolerance for build_g's truncation point.
inline constexpr double kTailTolerance = 1e-12;

/// Throws TailBoundError if the declared envelope leaves more than
/// kTailTolerance beyond t_max.
GTransform build_g(const WeightFunction& c, double t_max, int nodes_per_unit = 32);

/// Smallest t_max with remainder below kTailTolerance (at least T + 1).
double default_t_max(const WeightFunction& c);

/// Uniform or log-spaced grid on [a, b].
std::vector<double> linear_grid(double a, double b, int count);

}  // namespace minl2

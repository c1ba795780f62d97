#include "minl2/weightlab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace minl2 {

std::string to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::constant: return "constant";
    case WeightFamily::exp_rate: return "exp_rate";
    case WeightFamily::rational: return "rational";
    case WeightFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

double TailBound::remainder(double t) const {
  if (!integrable()) return std::numeric_limits<double>::infinity();
  return c0 * std::exp(-beta * t) / beta;
}

WeightFunction WeightFunction::constant(double value, double T) {
  if (!(value > 0.0)) throw ParameterError("constant weight must be positive");
  WeightFunction w;
  w.family_ = WeightFamily::constant;
  w.param_ = value;
  w.T_ = T;
  return w;
}

WeightFunction WeightFunction::exp_rate(double alpha, double T) {
  if (!std::isfinite(alpha)) throw ParameterError("exp_rate: alpha must be finite");
  WeightFunction w;
  w.family_ = WeightFamily::exp_rate;
  w.param_ = alpha;
  w.T_ = T;
  return w;
}

WeightFunction WeightFunction::rational(double a, double T) {
  if (!(a >= 0.0)) throw ParameterError("rational: coefficient must be >= 0");
  WeightFunction w;
  w.family_ = WeightFamily::rational;
  w.param_ = a;
  w.T_ = T;
  return w;
}

WeightFunction WeightFunction::tabulated(std::vector<double> t, std::vector<double> c) {
  if (t.size() != c.size() || t.size() < 2) throw ParameterError("tabulated: need >= 2 matching (t, c) pairs");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(c[i] > 0.0)) throw EvaluationError("tabulated: weight values must be positive");
    if (i > 0 && !(t[i] > t[i - 1])) throw ParameterError("tabulated: t must be strictly increasing");
  }
  const std::size_t n = t.size();
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = t[k + 1] - t[k];
    delta[k] = (c[k + 1] - c[k]) / h[k];
  }
  // Fritsch-Butland slopes: zero at local extrema, weighted harmonic mean elsewhere.
  std::vector<double> m(n);
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      m[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  WeightFunction w;
  w.family_ = WeightFamily::tabulated;
  w.param_ = 0.0;
  w.T_ = t.front();
  w.knots_ = std::move(t);
  w.values_ = std::move(c);
  w.slopes_ = std::move(m);
  return w;
}

WeightFunction WeightFunction::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open weight table '" + path + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  std::string line;
  if (!std::getline(in, line)) throw ParameterError(path + ": empty weight table");
  {
    std::string header;
    for (char ch : line)
      if (ch != ' ' && ch != '\t' && ch != '\r') header += ch;
    if (header != "t,c") throw ParameterError(path + ":1: expected header 't,c'");
  }
  std::vector<double> ts;
  std::vector<double> cs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParameterError(path + ":" + std::to_string(lineno) + ": expected 't,c'");
    try {
      std::size_t used = 0;
      const std::string a = trim(line.substr(0, comma));
      const std::string b = trim(line.substr(comma + 1));
      ts.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument(a);
      cs.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::logic_error&) {
      throw ParameterError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return tabulated(std::move(ts), std::move(cs));
}

double WeightFunction::eval_unchecked(double t) const {
  switch (family_) {
    case WeightFamily::constant: return param_;
    case WeightFamily::exp_rate: return std::exp(param_ * t);
    case WeightFamily::rational: return 1.0 / (1.0 + param_ * t * t);
    case WeightFamily::tabulated: {
      if (t >= knots_.back()) return values_.back();
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - knots_.begin() - 1));
      const double h = knots_[k + 1] - knots_[k];
      const double x = (t - knots_[k]) / h;
      const double x2 = x * x;
      const double x3 = x2 * x;
      return (2 * x3 - 3 * x2 + 1) * values_[k] + (x3 - 2 * x2 + x) * h * slopes_[k] +
             (-2 * x3 + 3 * x2) * values_[k + 1] + (x3 - x2) * h * slopes_[k + 1];
    }
  }
  return 0.0;
}

double WeightFunction::operator()(double t) const {
  if (t < T_) throw DomainError("weight evaluated at t=" + std::to_string(t) + " < T=" + std::to_string(T_));
  const double v = eval_unchecked(t);
  if (!(v > 0.0)) throw EvaluationError("weight " + describe() + " is not positive at t=" + std::to_string(t));
  return v;
}

double WeightFunction::derivative(double t) const {
  if (t < T_) throw DomainError("weight derivative at t < T");
  switch (family_) {
    case WeightFamily::constant: return 0.0;
    case WeightFamily::exp_rate: return param_ * std::exp(param_ * t);
    case WeightFamily::rational: {
      const double q = 1.0 + param_ * t * t;
      return -2.0 * param_ * t / (q * q);
    }
    case WeightFamily::tabulated: {
      if (t >= knots_.back()) return 0.0;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - knots_.begin() - 1));
      const double h = knots_[k + 1] - knots_[k];
      const double x = (t - knots_[k]) / h;
      const double x2 = x * x;
      return ((6 * x2 - 6 * x) * values_[k] + (-6 * x2 + 6 * x) * values_[k + 1]) / h +
             (3 * x2 - 4 * x + 1) * slopes_[k] + (3 * x2 - 2 * x) * slopes_[k + 1];
    }
  }
  return 0.0;
}

TailBound WeightFunction::tail() const {
  switch (family_) {
    case WeightFamily::constant: return {param_, 1.0};
    case WeightFamily::exp_rate: return {1.0, 1.0 - param_};
    case WeightFamily::rational: return {1.0, 1.0};
    case WeightFamily::tabulated: return {*std::max_element(values_.begin(), values_.end()), 1.0};
  }
  return {1.0, 0.0};
}

std::optional<double> WeightFunction::liminf() const {
  switch (family_) {
    case WeightFamily::constant: return param_;
    case WeightFamily::exp_rate:
      if (param_ > 0.0) return std::numeric_limits<double>::infinity();
      return param_ == 0.0 ? 1.0 : 0.0;
    case WeightFamily::rational: return param_ == 0.0 ? 1.0 : 0.0;
    case WeightFamily::tabulated: return values_.back();
  }
  return std::nullopt;
}

std::optional<double> WeightFunction::closed_form_tail_integral(double t) const {
  switch (family_) {
    case WeightFamily::constant: return param_ * std::exp(-t);
    case WeightFamily::exp_rate:
      if (param_ < 1.0) return std::exp((param_ - 1.0) * t) / (1.0 - param_);
      return std::nullopt;
    case WeightFamily::rational:
      if (param_ == 0.0) return std::exp(-t);
      return std::nullopt;
    case WeightFamily::tabulated: return std::nullopt;
  }
  return std::nullopt;
}

std::string WeightFunction::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  if (family_ == WeightFamily::tabulated)
    os << "(" << knots_.size() << " knots)";
  else
    os << "(" << param_ << ")";
  if (T_ != 0.0) os << " on (" << T_ << ",inf)";
  return os.str();
}

namespace {

std::vector<double> breakpoints_for(double a, double b, std::span<const double> knots) {
  std::vector<double> bp{a};
  for (double k : knots)
    if (k > a && k < b) bp.push_back(k);
  bp.push_back(b);
  return bp;
}

}  // namespace

double weighted_mass(const WeightFunction& c, double a, double b, const QuadOptions& opts) {
  if (a < c.T()) throw DomainError("weighted_mass: lower limit below T");
  if (b <= a) return 0.0;
  const auto integrand = [&c](double s) { return c(s) * std::exp(-s); };
  // Tabulated knots are C^1 joins; they go on panel boundaries.
  return integrate(integrand, breakpoints_for(a, b, c.knots()), opts).value;
}

double weighted_tail(const WeightFunction& c, double t, double t_end, const QuadOptions& opts) {
  const TailBound tail = c.tail();
  if (!tail.integrable())
    throw TailBoundError("weight " + c.describe() + " has no integrable tail envelope");
  const double upper = std::max(t_end, t + tail_window(tail.beta));
  return weighted_mass(c, t, upper, opts);
}

const ConditionFlag* ClassReport::find(const std::string& name) const {
  for (const auto& flag : conditions)
    if (flag.name == name) return &flag;
  return nullptr;
}

namespace {

void validate_grid(const WeightFunction& c, std::span<const double> grid, std::size_t min_points) {
  if (grid.size() < min_points)
    throw DomainError("grid needs at least " + std::to_string(min_points) + " points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > c.T())) throw DomainError("grid point " + std::to_string(grid[i]) + " is not in (T, inf)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  }
}

void finalize(ClassReport& report) {
  report.in_class = true;
  for (const auto& flag : report.conditions) {
    report.in_class = report.in_class && flag.holds;
    if (!flag.holds && !report.witness && flag.witness) report.witness = flag.witness;
  }
}

}  // namespace

ClassReport check_class_P(const WeightFunction& c, std::span<const double> grid, double liminf_floor) {
  validate_grid(c, grid, 16);
  if (!(liminf_floor > 0.0)) throw ParameterError("liminf_floor must be positive");
  std::vector<double> mass(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) mass[i] = c(grid[i]) * std::exp(-grid[i]);

  ClassReport report;
  report.tolerance = kMonotoneTol;

  ConditionFlag integrable{"integrable", false, std::nullopt, 0.0};
  if (c.tail().integrable()) {
    integrable.measured = weighted_tail(c, c.T());
    integrable.holds = std::isfinite(integrable.measured);
  } else {
    integrable.measured = std::numeric_limits<double>::infinity();
    integrable.witness = grid.back();
  }
  report.conditions.push_back(integrable);

  ConditionFlag monotone{"decreasing", true, std::nullopt, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double step = mass[i + 1] - mass[i];
    monotone.measured = std::max(monotone.measured, step);
    if (step > kMonotoneTol && monotone.holds) {
      monotone.holds = false;
      monotone.witness = grid[i];
    }
  }
  report.conditions.push_back(monotone);

  ConditionFlag lower{"liminf_positive", false, std::nullopt, 0.0};
  if (const auto analytic = c.liminf()) {
    lower.measured = *analytic;
  } else {
    const std::size_t start = grid.size() - std::max<std::size_t>(1, grid.size() / 4);
    lower.measured = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < grid.size(); ++i) lower.measured = std::min(lower.measured, c(grid[i]));
  }
  lower.holds = lower.measured > liminf_floor;
  if (!lower.holds) lower.witness = grid.back();
  report.conditions.push_back(lower);

  finalize(report);
  return report;
}

ClassReport check_class_C(const WeightFunction& c, std::span<const double> grid) {
  validate_grid(c, grid, 1);
  if (!c.tail().integrable())
    throw TailBoundError("check_class_C: weight " + c.describe() + " fails integrability");
  ClassReport report;
  report.tolerance = kStrictTol;
  ConditionFlag strict{"C_T", true, std::nullopt, std::numeric_limits<double>::infinity()};
  const double T = c.T();
  for (double t : grid) {
    const double inner = weighted_mass(c, T, t);
    const double nested =
        integrate([&](double s) { return (t - s) * c(s) * std::exp(-s); }, T, t).value;
    const double lhs = inner * inner;
    const double rhs = c(t) * std::exp(-t) * nested;
    if (lhs <= kStrictTol && rhs <= kStrictTol) {
      report.indeterminate.push_back(t);
      continue;
    }
    const double margin = lhs - rhs;
    strict.measured = std::min(strict.measured, margin);
    if (margin < kStrictTol && strict.holds) {
      strict.holds = false;
      strict.witness = t;
    }
  }
  report.conditions.push_back(strict);
  finalize(report);
  return report;
}

ClassReport log_derivative_margin(const WeightFunction& c, std::span<const double> grid, double bound) {
  validate_grid(c, grid, 1);
  ClassReport report;
  report.tolerance = 0.0;
  ConditionFlag flag{"log_derivative_below_bound", true, std::nullopt, -std::numeric_limits<double>::infinity()};
  for (double t : grid) {
    const double rate = c.log_derivative(t);
    flag.measured = std::max(flag.measured, rate);
    if (!(rate < bound) && flag.holds) {
      flag.holds = false;
      flag.witness = t;
    }
  }
  report.conditions.push_back(flag);
  finalize(report);
  return report;
}

GTransform::GTransform(WeightFunction weight, double t_max, int nodes_per_unit)
    : weight_(std::move(weight)), t_max_(t_max) {
  if (nodes_per_unit < 1) throw ParameterError("GTransform: nodes_per_unit must be >= 1");
  opts_.order = std::min(nodes_per_unit, 32);
  opts_.panels_per_unit = static_cast<double>(nodes_per_unit) / opts_.order;
  total_ = (*this)(weight_.T());
}

double GTransform::operator()(double t) const {
  if (t < weight_.T()) throw DomainError("g evaluated below T");
  return weighted_tail(weight_, t, t_max_, opts_);
}

double GTransform::derivative(double t) const { return -weight_(t) * std::exp(-t); }

double GTransform::inverse(double r) const {
  if (!(r > 0.0)) throw DomainError("g^{-1}: r must be positive");
  if (r >= total_) {
    if (r > total_ * (1.0 + 1e-12)) throw DomainError("g^{-1}: r exceeds g(T)");
    return weight_.T();
  }
  const double T = weight_.T();
  double lo = T;
  double step = 1.0;
  double hi = T + step;
  while ((*this)(hi) > r) {
    lo = hi;
    step *= 2.0;
    hi = T + step;
    if (step > 1e6) throw DomainError("g^{-1}: r below the resolvable range");
  }
  // Bisection with Newton acceleration; g is strictly decreasing.
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double value = (*this)(t) - r;
    if (value == 0.0) return t;
    (value > 0.0 ? lo : hi) = t;
    const double newton = t - value / derivative(t);
    const double next = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

double default_t_max(const WeightFunction& c) {
  const TailBound tail = c.tail();
  if (!tail.integrable()) throw TailBoundError("weight " + c.describe() + " has no integrable tail envelope");
  const double t = std::log(tail.c0 / (tail.beta * kTailTolerance)) / tail.beta;
  return std::max(c.T() + 1.0, std::ceil(t + 1.0));
}

GTransform build_g(const WeightFunction& c, double t_max, int nodes_per_unit) {
  const TailBound tail = c.tail();
  if (!tail.integrable()) throw TailBoundError("build_g: weight " + c.describe() + " is not integrable");
  if (!(t_max > c.T())) throw DomainError("build_g: t_max must exceed T");
  const double rem = tail.remainder(t_max);
  if (!(rem < kTailTolerance))
    throw TailBoundError("build_g: tail remainder " + std::to_string(rem) + " at t_max exceeds tolerance");
  return GTransform(c, t_max, nodes_per_unit);
}

std::vector<double> linear_grid(double a, double b, int count) {
  if (count < 1) throw ParameterError("grid count must be >= 1");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = a;
    return grid;
  }
  for (int i = 0; i < count; ++i) grid[i] = a + (b - a) * i / (count - 1);
  grid.back() = b;
  return grid;
}

}  // namespace minl2

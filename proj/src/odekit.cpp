#include "minl2/odekit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace minl2 {

// ---------------------------------------------------------------------------
// ODE system

namespace {
constexpr double kNearTMargin = 1e-3;
}

OdeSolution::OdeSolution(WeightFunction weight) : weight_(std::move(weight)), left_margin_(kNearTMargin) {
  if (!weight_.tail().integrable())
    throw TailBoundError("solve_gz: weight " + weight_.describe() + " is not integrable");
}

OdeSolution::Jet OdeSolution::at(double t) const {
  const double T = weight_.T();
  if (!(t > T)) throw SingularityError("u and s are singular at t = T");
  Jet j{};
  j.t = t;
  j.A = weighted_mass(weight_, T, t);
  if (!(j.A > std::numeric_limits<double>::min()))
    throw SingularityError("int_T^t c e^{-s} underflows at t=" + std::to_string(t));
  j.Q = integrate([&](double s) { return (t - s) * weight_(s) * std::exp(-s); }, T, t).value;
  const double c = weight_(t);
  const double dc = weight_.derivative(t);
  const double et = std::exp(-t);
  j.dA = c * et;
  j.d2A = (dc - c) * et;

  const double ra = j.dA / j.A;
  j.u = -std::log(j.A);
  j.du = -ra;
  j.d2u = -j.d2A / j.A + ra * ra;

  const double A2 = j.A * j.A;
  j.s = j.Q / j.A;
  j.ds = 1.0 - j.Q * j.dA / A2;
  j.d2s = -(j.A * j.dA + j.Q * j.d2A) / A2 + 2.0 * j.Q * j.dA * j.dA / (A2 * j.A);
  return j;
}

double OdeSolution::u_limit() const { return -std::log(weighted_tail(weight_, weight_.T())); }

OdeSolution solve_gz(const WeightFunction& c) { return OdeSolution(c); }

GzResidualReport verify_gz_residuals(const OdeSolution& sol, std::span<const double> grid) {
  GzResidualReport report;
  report.min_positivity = std::numeric_limits<double>::infinity();
  report.min_s = std::numeric_limits<double>::infinity();
  const WeightFunction& c = sol.weight();
  for (double t : grid) {
    if (t < c.T() + sol.left_margin()) {
      report.skipped.push_back(t);
      continue;
    }
    const auto j = sol.at(t);
    const double pos = j.d2u * j.s - j.d2s;
    if (!(pos > 0.0))
      throw SingularityError("u''s - s'' = " + std::to_string(pos) + " is not positive at t=" + std::to_string(t));
    GzResidualRow row;
    row.t = t;
    row.res1 = std::abs((j.s + j.ds * j.ds / pos) * std::exp(j.u - t) * c(t) - 1.0);
    row.res2 = std::abs(j.ds - j.s * j.du - 1.0);
    row.min_pos = pos;
    row.s = j.s;
    report.max_res1 = std::max(report.max_res1, row.res1);
    report.max_res2 = std::max(report.max_res2, row.res2);
    report.min_positivity = std::min(report.min_positivity, pos);
    report.min_s = std::min(report.min_s, j.s);
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Cutoff profile

CutoffProfile::CutoffProfile(double t0, double B) : t0_(t0), B_(B) {
  if (!(B > 0.0)) throw ParameterError("cutoff: B must be positive");
  if (!(t0 >= 0.0)) throw ParameterError("cutoff: t0 must be >= 0");
}

double CutoffProfile::b(double t) const {
  if (t >= -t0_) return 1.0;
  if (t <= -t0_ - B_) return 0.0;
  return (t + t0_ + B_) / B_;
}

double CutoffProfile::v(double t) const {
  if (t >= -t0_) return t;
  if (t <= -t0_ - B_) return -t0_ - 0.5 * B_;
  const double d = t + t0_ + B_;
  return -t0_ - 0.5 * B_ + d * d / (2.0 * B_);
}

CutoffProfile make_cutoff(double t0, double B) { return CutoffProfile(t0, B); }

// ---------------------------------------------------------------------------
// Bump and its partial moments

namespace {

constexpr int kBumpCells = 1024;
constexpr int kBumpOrder = 16;

double raw_bump(double y) {
  const double q = 1.0 - y * y;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// Cumulative tables of int_{-1}^{x_j} y^p exp(-1/(1-y^2)) dy on a uniform grid.
struct BumpTables {
  double h = 2.0 / kBumpCells;
  std::array<std::vector<double>, 3> cumulative;

  BumpTables() {
    const auto& rule = gauss_legendre(kBumpOrder);
    for (auto& col : cumulative) col.assign(kBumpCells + 1, 0.0);
    for (int j = 0; j < kBumpCells; ++j) {
      const double a = -1.0 + j * h;
      std::array<double, 3> cell{};
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double y = a + 0.5 * h * (rule.nodes[i] + 1.0);
        const double w = 0.5 * h * rule.weights[i] * raw_bump(y);
        cell[0] += w;
        cell[1] += w * y;
        cell[2] += w * y * y;
      }
      for (int p = 0; p < 3; ++p) cumulative[p][j + 1] = cumulative[p][j] + cell[p];
    }
  }

  double partial(double x, int p) const {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return cumulative[p][kBumpCells];
    const int j = std::min(kBumpCells - 1, static_cast<int>((x + 1.0) / h));
    const double a = -1.0 + j * h;
    double sum = cumulative[p][j];
    const auto& rule = gauss_legendre(kBumpOrder);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double y = a + 0.5 * (x - a) * (rule.nodes[i] + 1.0);
      sum += 0.5 * (x - a) * rule.weights[i] * raw_bump(y) * (p == 0 ? 1.0 : (p == 1 ? y : y * y));
    }
    return sum;
  }
};

const BumpTables& bump_tables() {
  static const BumpTables tables;
  return tables;
}

}  // namespace

Bump::Bump() {
  const auto& tables = bump_tables();
  norm_ = 1.0 / tables.cumulative[0][kBumpCells];
  m2_ = norm_ * tables.cumulative[2][kBumpCells];
}

const Bump& Bump::instance() {
  static const Bump bump;
  return bump;
}

double Bump::density(double x) const { return norm_ * raw_bump(x); }
double Bump::partial(double x, int power) const { return norm_ * bump_tables().partial(x, power); }
double Bump::cdf(double x) const { return x >= 1.0 ? 1.0 : partial(x, 0); }
double Bump::first_moment(double x) const { return x >= 1.0 ? 0.0 : partial(x, 1); }
double Bump::second_moment(double x) const { return x >= 1.0 ? m2_ : partial(x, 2); }

Mollifier::Mollifier(double eps) : eps_(eps) {
  if (!(eps > 0.0)) throw ParameterError("mollifier: eps must be positive");
}

double Mollifier::operator()(double t) const { return Bump::instance().density(t / eps_) / eps_; }
double Mollifier::cdf(double t) const { return Bump::instance().cdf(t / eps_); }

// ---------------------------------------------------------------------------
// Smoothed cutoff

namespace {

// S(x) = int_{-inf}^x R, W(x) = int_{-inf}^x S for the unit bump's CDF R.
double bump_S(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return x;
  const Bump& rho = Bump::instance();
  return x * rho.cdf(x) - rho.first_moment(x);
}

double bump_W(double x) {
  if (x <= -1.0) return 0.0;
  const Bump& rho = Bump::instance();
  if (x >= 1.0) return 0.5 * (x * x + rho.variance());
  return 0.5 * (x * x * rho.cdf(x) - 2.0 * x * rho.first_moment(x) + rho.second_moment(x));
}

}  // namespace

SmoothedCutoff::SmoothedCutoff(double t0, double B, double eps) : t0_(t0), B_(B), eps_(eps) {
  if (!(B > 0.0)) throw ParameterError("smoothed cutoff: B must be positive");
  if (!(t0 >= 0.0)) throw ParameterError("smoothed cutoff: t0 must be >= 0");
  if (!(eps > 0.0 && eps < B / 8.0)) throw ParameterError("smoothed cutoff: need 0 < eps < B/8");
  left_ = -t0 - B + 2.0 * eps;
  right_ = -t0 - 2.0 * eps;
  delta_ = 0.25 * eps;
  scale_ = 1.0 / (B - 4.0 * eps);
}

double SmoothedCutoff::d2v(double t) const {
  const Bump& rho = Bump::instance();
  return scale_ * (rho.cdf((t - left_) / delta_) - rho.cdf((t - right_) / delta_));
}

double SmoothedCutoff::dv(double t) const {
  const double xa = (t - left_) / delta_;
  const double xb = (t - right_) / delta_;
  if (xb >= 1.0) return 1.0;
  return scale_ * delta_ * (bump_S(xa) - bump_S(xb));
}

double SmoothedCutoff::primitive(double t) const {
  const double xa = (t - left_) / delta_;
  const double xb = (t - right_) / delta_;
  if (xb >= 1.0) return t - 0.5 * (left_ + right_);
  return scale_ * delta_ * delta_ * (bump_W(xa) - bump_W(xb));
}

double SmoothedCutoff::v(double t) const { return primitive(t) - primitive(0.0); }

SmoothedCutoff make_smoothed_cutoff(double t0, double B, double eps) { return SmoothedCutoff(t0, B, eps); }

// ---------------------------------------------------------------------------
// Regularized maximum

MaxSmoother::MaxSmoother(double eps, int panels, int order) : eps_(eps) {
  if (!(eps > 0.0)) throw ParameterError("max smoother: eps must be positive");
  const double bp[2] = {-1.0, 1.0};
  outer_ = composite_nodes(bp, order, 0.5 * panels);
}

double MaxSmoother::operator()(double x, double y) const {
  if (x - y >= 2.0 * eps_) return x;
  if (x - y <= -2.0 * eps_) return y;
  const Bump& rho = Bump::instance();
  // Inner integral over the y-mollifier in closed form via the bump's CDF R and
  // first partial moment P1; outer integral by quadrature.
  double sum = 0.0;
  for (std::size_t i = 0; i < outer_.size(); ++i) {
    const double sp = outer_.x[i];
    const double p = x - eps_ * sp;
    const double kappa = (y - x) / eps_ + sp;
    const double R = rho.cdf(kappa);
    const double inner = y * R - eps_ * rho.first_moment(kappa) + p * (1.0 - R);
    sum += outer_.w[i] * rho.density(sp) * inner;
  }
  return sum;
}

double MaxSmoother::gap_constant() {
  static const double value = [] {
    const Bump& rho = Bump::instance();
    const double bp[3] = {-1.0, 0.0, 1.0};
    const NodeList nodes = composite_nodes(bp, 32, 8.0);
    const double p1_zero = rho.first_moment(0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double s = nodes.x[i];
      const double above = s >= 0.0 ? -rho.first_moment(s) : rho.first_moment(s) - 2.0 * p1_zero;
      sum += nodes.w[i] * rho.density(s) * (std::abs(s) * rho.cdf(s) + above);
    }
    return sum;
  }();
  return value;
}

MaxSmoother make_max_smoother(double eps) { return MaxSmoother(eps); }

}  // namespace minl2

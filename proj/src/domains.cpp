#include "minl2/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace minl2 {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::disk: return "disk";
    case DomainKind::ball: return "ball";
    case DomainKind::polydisc: return "polydisc";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// PhiSpec

PhiSpec PhiSpec::radial_power(double a) {
  if (!(a >= 0.0)) throw ParameterError("radial_power phi needs a >= 0 for plurisubharmonicity");
  PhiSpec phi;
  phi.tag_ = Tag::radial_power;
  phi.a_ = a;
  return phi;
}

PhiSpec PhiSpec::log_modulus(Polynomial h) {
  if (h.is_zero()) throw ParameterError("log_modulus phi needs a nonzero polynomial");
  PhiSpec phi;
  phi.tag_ = Tag::log_modulus;
  phi.h_ = std::move(h);
  return phi;
}

double PhiSpec::operator()(std::span<const cplx> z) const {
  switch (tag_) {
    case Tag::zero: return 0.0;
    case Tag::radial_power: {
      double r2 = 0.0;
      for (const auto& zj : z) r2 += std::norm(zj);
      return a_ * r2;
    }
    case Tag::log_modulus: return std::log(std::norm(h_(z)));
  }
  return 0.0;
}

double PhiSpec::exp_neg(std::span<const cplx> z) const {
  switch (tag_) {
    case Tag::zero: return 1.0;
    case Tag::radial_power: {
      double r2 = 0.0;
      for (const auto& zj : z) r2 += std::norm(zj);
      return std::exp(-a_ * r2);
    }
    case Tag::log_modulus: return 1.0 / std::norm(h_(z));
  }
  return 1.0;
}

bool PhiSpec::reinhardt() const {
  return tag_ != Tag::log_modulus || h_.terms().size() == 1;
}

std::string PhiSpec::describe() const {
  switch (tag_) {
    case Tag::zero: return "zero";
    case Tag::radial_power: {
      std::ostringstream os;
      os << "radial_power(" << a_ << ")";
      return os.str();
    }
    case Tag::log_modulus: return "log_modulus(" + h_.describe() + ")";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Grids and level rules

QuadratureGrid QuadratureGrid::with_resolution(int n) {
  if (n < 4) throw ParameterError("resolution must be >= 4");
  QuadratureGrid g;
  g.angular = n;
  g.raw_resolution = n;
  return g;
}

QuadratureGrid QuadratureGrid::refined() const {
  QuadratureGrid g = *this;
  g.radial_panels_per_unit *= 2.0;
  g.simplex_order = simplex_order + simplex_order / 2;
  g.free_radial_order = free_radial_order + free_radial_order / 2;
  g.angular = angular + angular / 2;
  g.angular_multi = angular_multi + angular_multi / 2;
  return g;
}

void LevelRule::point(std::size_t i, double R, std::vector<cplx>& z) const {
  z.resize(n);
  for (int j = 0; j < n; ++j) z[j] = pole[j] ? R * points[i * n + j] : points[i * n + j];
}

namespace {

struct ModulusNodes {
  std::vector<std::vector<double>> moduli;
  std::vector<double> weights;
};

// Unit sphere S^{2m-1} pushed to the simplex: |u_j|^2 = x_j, d sigma = 2^{1-m} dx dtheta.
ModulusNodes ball_level_moduli(int m, int order) {
  ModulusNodes out;
  if (m == 1) {
    out.moduli.push_back({1.0});
    out.weights.push_back(1.0);
    return out;
  }
  const auto& rule = gauss_legendre(order);
  const double base = std::ldexp(1.0, 1 - m);
  std::vector<double> x(m);
  // Collapsed coordinates x_1 = u_1, x_2 = (1-u_1) u_2, ...
  std::function<void(int, double, double)> recurse = [&](int k, double remaining, double weight) {
    if (k == m - 1) {
      x[k] = remaining;
      std::vector<double> mod(m);
      for (int j = 0; j < m; ++j) mod[j] = std::sqrt(std::max(0.0, x[j]));
      out.moduli.push_back(std::move(mod));
      out.weights.push_back(base * weight);
      return;
    }
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double u = 0.5 * (rule.nodes[i] + 1.0);
      x[k] = remaining * u;
      recurse(k + 1, remaining * (1.0 - u), weight * 0.5 * rule.weights[i] * remaining);
    }
  };
  recurse(0, 1.0, 1.0);
  return out;
}

// Polydisc level set {max_j |u_j| / r_j = 1}, split into sectors where
// coordinate k attains the max.
ModulusNodes polydisc_level_moduli(std::span<const double> radii, int order) {
  const int m = static_cast<int>(radii.size());
  const auto& rule = gauss_legendre(order);
  double area = 1.0;
  for (double r : radii) area *= r * r;
  ModulusNodes out;
  std::vector<double> mod(m);
  for (int k = 0; k < m; ++k) {
    std::function<void(int, double)> recurse = [&](int j, double weight) {
      if (j == m) {
        out.moduli.push_back(mod);
        out.weights.push_back(area * weight);
        return;
      }
      if (j == k) {
        mod[j] = radii[j];
        recurse(j + 1, weight);
        return;
      }
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double y = 0.5 * (rule.nodes[i] + 1.0);
        mod[j] = radii[j] * y;
        recurse(j + 1, weight * 0.5 * rule.weights[i] * y);
      }
    };
    recurse(0, 1.0);
  }
  return out;
}

// Full disks |z_j| < r_j with weight rho d rho.
ModulusNodes free_moduli(std::span<const double> radii, int order) {
  const auto& rule = gauss_legendre(order);
  ModulusNodes out;
  out.moduli.push_back({});
  out.weights.push_back(1.0);
  for (double r : radii) {
    ModulusNodes next;
    for (std::size_t p = 0; p < out.weights.size(); ++p) {
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double rho = 0.5 * r * (rule.nodes[i] + 1.0);
        auto mod = out.moduli[p];
        mod.push_back(rho);
        next.moduli.push_back(std::move(mod));
        next.weights.push_back(out.weights[p] * 0.5 * r * rule.weights[i] * rho);
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DomainModel

DomainModel::DomainModel(DomainKind kind, int n, int m, std::vector<double> radii, PhiSpec phi)
    : kind_(kind), n_(n), m_(m), radii_(std::move(radii)), phi_(std::move(phi)) {
  validate_phi();
}

DomainModel DomainModel::disk(PhiSpec phi) { return DomainModel(DomainKind::disk, 1, 1, {1.0}, std::move(phi)); }

DomainModel DomainModel::ball(int n, PhiSpec phi) {
  if (n < 1) throw ParameterError("ball: dimension must be >= 1");
  return DomainModel(DomainKind::ball, n, n, std::vector<double>(n, 1.0), std::move(phi));
}

DomainModel DomainModel::polydisc(std::vector<double> radii, PhiSpec phi) {
  const int n = static_cast<int>(radii.size());
  return polydisc_slice(std::move(radii), n, std::move(phi));
}

DomainModel DomainModel::polydisc_slice(std::vector<double> radii, int codim, PhiSpec phi) {
  const int n = static_cast<int>(radii.size());
  if (n < 1) throw ParameterError("polydisc: need at least one radius");
  for (double r : radii)
    if (!(r > 0.0)) throw ParameterError("polydisc: radii must be positive");
  if (codim < 1 || codim > n) throw ParameterError("polydisc: codimension must be in [1, n]");
  return DomainModel(DomainKind::polydisc, n, codim, std::move(radii), std::move(phi));
}

DomainModel DomainModel::with_phi(PhiSpec phi) const {
  return DomainModel(kind_, n_, m_, radii_, std::move(phi));
}

void DomainModel::validate_phi() const {
  if (phi_.tag() != PhiSpec::Tag::log_modulus) return;
  if (phi_.h().variables() != n_) throw ParameterError("log_modulus phi: h has wrong number of variables");
  // Sample |h| on a polar product grid over the closed domain.
  constexpr int kModuli = 5;
  constexpr int kAngles = 16;
  double min_h = std::numeric_limits<double>::infinity();
  double max_h = 0.0;
  std::vector<cplx> z(n_);
  std::vector<int> idx(2 * n_, 0);
  const int per = kModuli * kAngles;
  long total = 1;
  for (int j = 0; j < n_; ++j) total *= per;
  for (long code = 0; code < total; ++code) {
    long c = code;
    double r2 = 0.0;
    for (int j = 0; j < n_; ++j) {
      const int slot = static_cast<int>(c % per);
      c /= per;
      const double rho = radii_[j] * (slot / kAngles) / (kModuli - 1.0);
      const double theta = kTwoPi * (slot % kAngles) / kAngles;
      z[j] = std::polar(rho, theta);
      r2 += rho * rho;
    }
    if (kind_ != DomainKind::polydisc && r2 > 1.0 + 1e-12) continue;
    const double mag = std::abs(phi_.h()(z));
    min_h = std::min(min_h, mag);
    max_h = std::max(max_h, mag);
  }
  if (!(min_h > 1e-6 * std::max(1.0, max_h)))
    throw ParameterError("log_modulus phi: h vanishes (or nearly) on the closed domain; e^{-phi} is not integrable");
}

double DomainModel::psi(std::span<const cplx> z) const {
  if (kind_ != DomainKind::polydisc) {
    double r2 = 0.0;
    for (const auto& zj : z) r2 += std::norm(zj);
    return n_ * std::log(r2);  // 2n log|z|
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int j = n_ - m_; j < n_; ++j) best = std::max(best, std::log(std::abs(z[j]) / radii_[j]));
  return 2.0 * m_ * best;
}

bool DomainModel::contains(std::span<const cplx> z) const {
  if (kind_ != DomainKind::polydisc) {
    double r2 = 0.0;
    for (const auto& zj : z) r2 += std::norm(zj);
    return r2 < 1.0;
  }
  for (int j = 0; j < n_; ++j)
    if (!(std::abs(z[j]) < radii_[j])) return false;
  return true;
}

double DomainModel::sublevel_scale(double t) const { return std::exp(-t / (2.0 * m_)); }

LevelRule DomainModel::level_rule(const QuadratureGrid& grid, bool radial_only) const {
  ModulusNodes pole_nodes;
  if (kind_ == DomainKind::polydisc) {
    pole_nodes = polydisc_level_moduli(std::span<const double>(radii_).subspan(n_ - m_), grid.simplex_order);
  } else {
    pole_nodes = ball_level_moduli(m_, grid.simplex_order);
  }
  const ModulusNodes free_nodes =
      free_moduli(std::span<const double>(radii_).subspan(0, n_ - m_), grid.free_radial_order);

  LevelRule rule;
  rule.n = n_;
  rule.pole.assign(n_, 0);
  for (int j = n_ - m_; j < n_; ++j) rule.pole[j] = 1;

  const int angles = radial_only ? 1 : grid.angular_nodes(n_);
  const double angle_weight = radial_only ? kTwoPi : kTwoPi / angles;
  long angle_combos = 1;
  for (int j = 0; j < n_; ++j) angle_combos *= angles;
  double angle_factor = 1.0;
  for (int j = 0; j < n_; ++j) angle_factor *= angle_weight;

  std::vector<cplx> phases(angles);
  for (int q = 0; q < angles; ++q) phases[q] = std::polar(1.0, kTwoPi * q / angles);

  const std::size_t count = free_nodes.weights.size() * pole_nodes.weights.size() * angle_combos;
  rule.points.reserve(count * n_);
  rule.weights.reserve(count);
  for (std::size_t f = 0; f < free_nodes.weights.size(); ++f) {
    for (std::size_t p = 0; p < pole_nodes.weights.size(); ++p) {
      const double w = free_nodes.weights[f] * pole_nodes.weights[p] * angle_factor;
      for (long code = 0; code < angle_combos; ++code) {
        long c = code;
        for (int j = 0; j < n_; ++j) {
          const double mod = j < n_ - m_ ? free_nodes.moduli[f][j] : pole_nodes.moduli[p][j - (n_ - m_)];
          rule.points.push_back(mod * phases[c % angles]);
          c /= angles;
        }
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

std::string DomainModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == DomainKind::ball) os << "(" << n_ << ")";
  if (kind_ == DomainKind::polydisc) {
    os << "(";
    for (int j = 0; j < n_; ++j) os << (j ? "," : "") << radii_[j];
    os << ")";
    if (is_slice()) os << " slice codim " << m_;
  }
  os << ", phi=" << phi_.describe();
  return os.str();
}

// ---------------------------------------------------------------------------
// Integration

NodeList radial_rule(const DomainModel& dom, std::span<const double> breakpoints, const QuadratureGrid& grid) {
  NodeList nodes = composite_nodes(breakpoints, grid.radial_order, grid.radial_panels_per_unit);
  const double inv = 1.0 / (2.0 * dom.pole_dimension());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes.w[i] *= std::exp(-nodes.x[i]) * inv;
  return nodes;
}

double radial_cutoff(double t, double decay, const QuadratureGrid& grid) {
  return t + tail_window(decay, grid.tail_rel);
}

void visit_level_nodes(const DomainModel& dom, std::span<const double> s_breakpoints, const QuadratureGrid& grid,
                       bool radial_only, const NodeVisitor& visit) {
  const LevelRule rule = dom.level_rule(grid, radial_only);
  const NodeList s_nodes = radial_rule(dom, s_breakpoints, grid);
  const double inv2m = 1.0 / (2.0 * dom.pole_dimension());
  std::vector<cplx> z;
  for (std::size_t k = 0; k < s_nodes.size(); ++k) {
    const double s = s_nodes.x[k];
    const double R = std::exp(-s * inv2m);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      rule.point(i, R, z);
      visit(z, s, s_nodes.w[k] * rule.weights[i]);
    }
  }
}

namespace {

struct Sums {
  double value = 0.0;
  double l1 = 0.0;
};

Sums level_sums(const DomainModel& dom, std::span<const double> bp, const LevelIntegrand& f,
                const QuadratureGrid& grid, bool radial_only) {
  // Neumaier summation.
  Sums sums;
  double carry = 0.0;
  visit_level_nodes(dom, bp, grid, radial_only, [&](std::span<const cplx> z, double s, double w) {
    const double v = w * f(z, s);
    const double next = sums.value + v;
    carry += std::abs(sums.value) >= std::abs(v) ? (sums.value - next) + v : (v - next) + sums.value;
    sums.value = next;
    sums.l1 += std::abs(v);
  });
  sums.value += carry;
  return sums;
}

IntegralEstimate refined_estimate(const DomainModel& dom, std::span<const double> bp, const LevelIntegrand& f,
                                  const QuadratureGrid& grid, bool radial_only) {
  const Sums coarse = level_sums(dom, bp, f, grid, radial_only);
  const Sums fine = level_sums(dom, bp, f, grid.refined(), radial_only);
  const double diff = std::abs(fine.value - coarse.value);
  if (diff > grid.refine_tol * std::abs(fine.value) + 1e-14 * fine.l1) {
    std::ostringstream os;
    os << "sublevel integral on " << dom.describe() << ": resolutions disagree (" << coarse.value << " vs "
       << fine.value << ")";
    throw RefinementError(os.str());
  }
  return {fine.value, diff};
}

}  // namespace

double level_integral(const DomainModel& dom, std::span<const double> s_breakpoints, const LevelIntegrand& f,
                      const QuadratureGrid& grid, bool radial_only) {
  return level_sums(dom, s_breakpoints, f, grid, radial_only).value;
}

IntegralEstimate sublevel_volume_integral(const DomainModel& dom, double t, const LevelIntegrand& f,
                                          const QuadratureGrid& grid, double decay, bool radial_only) {
  if (!(t >= 0.0)) throw DomainError("sublevel integral needs t >= 0");
  const double bp[2] = {t, radial_cutoff(t, decay, grid)};
  return refined_estimate(dom, bp, f, grid, radial_only);
}

IntegralEstimate sublevel_volume_integral(const DomainModel& dom, double t, const PointIntegrand& f,
                                          const QuadratureGrid& grid) {
  return sublevel_volume_integral(dom, t, [&f](std::span<const cplx> z, double) { return f(z); }, grid);
}

IntegralEstimate strip_integral(const DomainModel& dom, double t, const LevelIntegrand& f,
                                const QuadratureGrid& grid, bool radial_only) {
  if (!(t >= 0.0)) throw DomainError("strip integral needs t >= 0");
  const double bp[2] = {t, t + 1.0};
  return refined_estimate(dom, bp, f, grid, radial_only);
}

double raw_sublevel_integral(const DomainModel& dom, double t, const PointIntegrand& f, int resolution) {
  if (!(t >= 0.0)) throw DomainError("sublevel integral needs t >= 0");
  if (resolution < 2) throw ParameterError("raw quadrature resolution must be >= 2");
  const auto& rule = gauss_legendre(resolution);
  const int n = dom.dimension();
  const int free = n - dom.pole_dimension();
  const double R = dom.sublevel_scale(t);
  const bool ball = dom.kind() != DomainKind::polydisc;
  std::vector<cplx> z(n);
  std::vector<cplx> phases(resolution);
  for (int q = 0; q < resolution; ++q) phases[q] = std::polar(1.0, kTwoPi * q / resolution);
  const double dtheta = kTwoPi / resolution;

  std::function<double(int, double)> recurse = [&](int j, double used) -> double {
    if (j == n) return f(z);
    double bound;
    if (ball)
      bound = std::sqrt(std::max(0.0, R * R - used));
    else
      bound = j < free ? dom.radii()[j] : R * dom.radii()[j];
    double sum = 0.0;
    for (int i = 0; i < resolution; ++i) {
      const double rho = 0.5 * bound * (rule.nodes[i] + 1.0);
      const double w = 0.5 * bound * rule.weights[i] * rho * dtheta;
      double ring = 0.0;
      for (int q = 0; q < resolution; ++q) {
        z[j] = rho * phases[q];
        ring += recurse(j + 1, used + rho * rho);
      }
      sum += w * ring;
    }
    return sum;
  };
  return recurse(0, 0.0);
}

Condition3Report check_condition3(const DomainModel& dom, const WeightFunction& c, double compact_radius,
                                  double cap_radius, int radial_samples) {
  if (!(compact_radius > 0.0 && compact_radius < 1.0))
    throw ParameterError("condition (3): compact radius must lie in (0, 1)");
  if (!(cap_radius > 0.0 && cap_radius < compact_radius))
    throw ParameterError("condition (3): pole cap must lie in (0, compact radius)");
  QuadratureGrid grid;
  grid.simplex_order = 8;
  grid.free_radial_order = 8;
  grid.angular = 16;
  const LevelRule rule = dom.level_rule(grid, false);
  Condition3Report report;
  report.cap_radius = cap_radius;
  report.lower_bound = std::numeric_limits<double>::infinity();
  std::vector<cplx> z;
  for (int k = 0; k < radial_samples; ++k) {
    const double R = cap_radius + (compact_radius - cap_radius) * k / std::max(1, radial_samples - 1);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      rule.point(i, R, z);
      for (int j = 0; j < dom.dimension(); ++j)
        if (!rule.pole[j]) z[j] *= compact_radius;
      const double value = dom.phi().exp_neg(z) * c(-dom.psi(z));
      if (value < report.lower_bound) {
        report.lower_bound = value;
        report.witness = z;
      }
    }
  }
  report.holds = std::isfinite(report.lower_bound) && report.lower_bound > 0.0;
  return report;
}

}  // namespace minl2

#pragma once

// Model Stein domains (disk, ball, polydisc) with a Green-pole weight psi,
// auxiliary weight phi and quadrature over the sublevel sets {psi < -t}.
//
// Integration substrate: with s = -psi the pole factor's level sets are
// scalings of a fixed unit set by R(s) = exp(-s / 2m), m the number of pole
// coordinates, and
//
//   int_{psi < -t} F dlambda = int_t^inf (e^{-s} / 2m) sum_i w_i F(z_i(s)) ds,
//
// where (z_i(s), w_i) is a fixed level rule with the pole coordinates scaled
// by R(s). A raw polar tensor rule without the substitution is kept as an
// independent cross-check.

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minl2/polynomial.hpp"
#include "minl2/quadrature.hpp"
#include "minl2/weightlab.hpp"

namespace minl2 {

enum class DomainKind { disk, ball, polydisc };

std::string to_string(DomainKind kind);

/// Auxiliary weight phi.
class PhiSpec {
 public:
  enum class Tag { zero, radial_power, log_modulus };

  static PhiSpec zero() { return PhiSpec(); }
  /// phi(z) = a |z|^2, a >= 0.
  static PhiSpec radial_power(double a);
  /// phi(z) = 2 log |h(z)|; h must be zero-free on the closed domain.
  static PhiSpec log_modulus(Polynomial h);

  Tag tag() const { return tag_; }
  double a() const { return a_; }
  const Polynomial& h() const { return h_; }

  double operator()(std::span<const cplx> z) const;
  /// e^{-phi(z)}.
  double exp_neg(std::span<const cplx> z) const;
  /// True when phi depends only on (|z_1|, ..., |z_n|).
  bool reinhardt() const;
  std::string describe() const;

 private:
  Tag tag_ = Tag::zero;
  double a_ = 0.0;
  Polynomial h_;
};

struct QuadratureGrid {
  int radial_order = 32;              // GL nodes per s-panel
  double radial_panels_per_unit = 1;  // s-panels per unit length
  int simplex_order = 24;             // GL nodes per simplex / cube direction
  int free_radial_order = 48;         // GL nodes in |z_j| on free disk factors
  int angular = 64;                   // trapezoid nodes per torus direction (N)
  int angular_multi = 16;             // cap on N when n >= 2 (the torus rule has N^n nodes)
  double tail_rel = 1e-16;            // relative truncation of the s-tail
  double refine_tol = 1e-8;           // tolerance between two resolutions
  int raw_resolution = 256;           // raw tensor rule: nodes per real direction

  int angular_nodes(int n) const { return n == 1 ? angular : std::min(angular, angular_multi); }

  static QuadratureGrid with_resolution(int n);
  /// Same grid with twice the s-panels and simplex/free nodes.
  QuadratureGrid refined() const;
};

/// Fixed level rule; pole coordinates are stored at unit scale.
struct LevelRule {
  int n = 0;
  std::vector<cplx> points;  // n per node
  std::vector<double> weights;
  std::vector<char> pole;  // pole[j] != 0 if coordinate j scales with R

  std::size_t size() const { return weights.size(); }
  void point(std::size_t i, double R, std::vector<cplx>& z) const;
};

/// Integrand on a level set: F(z, s) with s = -psi(z).
using LevelIntegrand = std::function<double(std::span<const cplx> z, double s)>;
using PointIntegrand = std::function<double(std::span<const cplx> z)>;

class DomainModel {
 public:
  /// Unit disk in C, psi = 2 log|z|.
  static DomainModel disk(PhiSpec phi = PhiSpec::zero());
  /// Unit ball in C^n, psi = 2n log|z|.
  static DomainModel ball(int n, PhiSpec phi = PhiSpec::zero());
  /// Polydisc with the given radii, psi = 2n max_j log(|z_j| / r_j).
  static DomainModel polydisc(std::vector<double> radii, PhiSpec phi = PhiSpec::zero());
  /// Polydisc with psi = 2k max_{j > n-k} log(|z_j| / r_j): the weight for the
  /// coordinate slice X = {z_{n-k+1} = ... = z_n = 0} of codimension k.
  static DomainModel polydisc_slice(std::vector<double> radii, int codim, PhiSpec phi = PhiSpec::zero());

  DomainKind kind() const { return kind_; }
  int dimension() const { return n_; }
  /// Number of coordinates psi depends on (n for Green poles, k for slices).
  int pole_dimension() const { return m_; }
  bool is_slice() const { return m_ < n_; }
  const std::vector<double>& radii() const { return radii_; }
  const PhiSpec& phi() const { return phi_; }
  DomainModel with_phi(PhiSpec phi) const;

  double psi(std::span<const cplx> z) const;
  bool contains(std::span<const cplx> z) const;
  bool in_sublevel(std::span<const cplx> z, double t) const { return contains(z) && psi(z) < -t; }
  /// Scale factor R(t) = e^{-t/(2m)} of the pole factor of {psi < -t}.
  double sublevel_scale(double t) const;
  /// Both phi and psi depend only on the moduli |z_j|.
  bool reinhardt() const { return phi_.reinhardt(); }

  /// Level rule; radial_only drops the torus angles (valid for integrands that
  /// depend only on |z_j|) and folds (2 pi)^n into the weights.
  LevelRule level_rule(const QuadratureGrid& grid, bool radial_only) const;

  std::string describe() const;

 private:
  DomainModel(DomainKind kind, int n, int m, std::vector<double> radii, PhiSpec phi);
  void validate_phi() const;

  DomainKind kind_;
  int n_;
  int m_;
  std::vector<double> radii_;
  PhiSpec phi_;
};

/// s-nodes on [s_lo, s_hi] with weights already multiplied by e^{-s}/(2m).
NodeList radial_rule(const DomainModel& dom, std::span<const double> breakpoints, const QuadratureGrid& grid);

/// Upper s-limit for sublevel integrals starting at t, for an integrand whose
/// s-profile times e^{-s} decays at least like e^{-decay s}.
double radial_cutoff(double t, double decay, const QuadratureGrid& grid);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // difference between the two resolutions
};

/// Calls visit(z, s, w) for every node of the level-set rule over the s-range
/// given by the breakpoints; w already contains the e^{-s}/(2m) factor.
using NodeVisitor = std::function<void(std::span<const cplx> z, double s, double w)>;
void visit_level_nodes(const DomainModel& dom, std::span<const double> s_breakpoints, const QuadratureGrid& grid,
                       bool radial_only, const NodeVisitor& visit);

/// int over {s_lo < -psi < s_hi} of F by the level-set path at one resolution.
double level_integral(const DomainModel& dom, std::span<const double> s_breakpoints, const LevelIntegrand& f,
                      const QuadratureGrid& grid, bool radial_only = false);

/// int_{psi < -t} F dlambda, with refinement check. Throws RefinementError if two
/// resolutions differ by more than grid.refine_tol (relative, with an absolute
/// floor scaled by the integral of |F|).
IntegralEstimate sublevel_volume_integral(const DomainModel& dom, double t, const LevelIntegrand& f,
                                          const QuadratureGrid& grid = {}, double decay = 1.0,
                                          bool radial_only = false);
IntegralEstimate sublevel_volume_integral(const DomainModel& dom, double t, const PointIntegrand& f,
                                          const QuadratureGrid& grid = {});

/// int_{-1-t < psi < -t} F dlambda.
IntegralEstimate strip_integral(const DomainModel& dom, double t, const LevelIntegrand& f,
                                const QuadratureGrid& grid = {}, bool radial_only = false);

/// Independent polar tensor quadrature over {psi < -t} without the s
/// substitution (grid.raw_resolution nodes per real direction). Integrand must
/// be bounded.
double raw_sublevel_integral(const DomainModel& dom, double t, const PointIntegrand& f, int resolution);

struct Condition3Report {
  bool holds = false;
  double lower_bound = 0.0;
  std::vector<cplx> witness;  // point attaining the sampled minimum
  double cap_radius = 0.0;
};

/// Samples e^{-phi} c(-psi) on {cap <= R <= compact_radius} (R the pole-factor
/// scale, free coordinates up to compact_radius of their disks).
Condition3Report check_condition3(const DomainModel& dom, const WeightFunction& c, double compact_radius,
                                  double cap_radius = 1e-2, int radial_samples = 64);

}  // namespace minl2

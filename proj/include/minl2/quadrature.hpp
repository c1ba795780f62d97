#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "minl2/errors.hpp"

namespace minl2 {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Returns the cached n-point rule. Thread safe.
const GaussLegendre& gauss_legendre(int n);

/// A flat list of (abscissa, weight) pairs on a finite interval.
struct NodeList {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void append_panel(const GaussLegendre& rule, double a, double b);
};

/// Composite rule: every panel between consecutive breakpoints is split into
/// ceil(length * panels_per_unit) equal panels carrying an `order`-point rule.
NodeList composite_nodes(std::span<const double> breakpoints, int order, double panels_per_unit);

struct QuadOptions {
  int order = 32;                 // nodes per panel
  double panels_per_unit = 1.0;   // 32 nodes per unit interval by default
  double rel_tol = 1e-10;         // successive doubling criterion
  double abs_tol = 0.0;           // floor added to rel_tol * |I|
  int max_doublings = 10;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // |I_fine - I_coarse|
  int doublings = 0;
};

/// Composite Gauss-Legendre with panel doubling until two successive estimates
/// agree. Integrand kinks must sit on `breakpoints` (sorted, at least two).
QuadResult integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                     const QuadOptions& opts = {});

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts = {});

/// Length L such that e^{-beta L} <= rel_floor, i.e. the relative remainder of an
/// integrand decaying like e^{-beta s} after truncating at a + L.
double tail_window(double beta, double rel_floor = 1e-16);

}  // namespace minl2

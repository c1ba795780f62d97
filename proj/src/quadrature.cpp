#include "minl2/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace minl2 {

namespace {

GaussLegendre make_rule(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(make_rule(n));
  return *slot;
}

void NodeList::append_panel(const GaussLegendre& rule, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    x.push_back(mid + half * rule.nodes[i]);
    w.push_back(half * rule.weights[i]);
  }
}

NodeList composite_nodes(std::span<const double> breakpoints, int order, double panels_per_unit) {
  if (breakpoints.size() < 2) throw ParameterError("composite_nodes: need at least two breakpoints");
  const auto& rule = gauss_legendre(order);
  NodeList out;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k];
    const double b = breakpoints[k + 1];
    if (!(b >= a)) throw ParameterError("composite_nodes: breakpoints must be sorted");
    if (b == a) continue;
    const auto panels = static_cast<int>(std::max(1.0, std::ceil((b - a) * panels_per_unit - 1e-9)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) out.append_panel(rule, a + p * h, (p + 1 == panels) ? b : a + (p + 1) * h);
  }
  return out;
}

namespace {

struct Estimate {
  double value;
  double l1;
};

Estimate estimate(const std::function<double(double)>& f, const NodeList& nodes) {
  double sum = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = nodes.w[i] * f(nodes.x[i]);
    sum += v;
    l1 += std::abs(v);
  }
  return {sum, l1};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                     const QuadOptions& opts) {
  double density = opts.panels_per_unit;
  Estimate coarse = estimate(f, composite_nodes(breakpoints, opts.order, density));
  for (int d = 1; d <= opts.max_doublings; ++d) {
    density *= 2.0;
    const Estimate fine = estimate(f, composite_nodes(breakpoints, opts.order, density));
    const double diff = std::abs(fine.value - coarse.value);
    // 1e-15 * l1 absorbs roundoff when the integral cancels to ~0.
    if (diff <= opts.rel_tol * std::abs(fine.value) + opts.abs_tol + 1e-15 * fine.l1) {
      return {fine.value, diff, d};
    }
    if (!std::isfinite(fine.value)) break;
    coarse = fine;
  }
  throw RefinementError("integrate: panel doubling did not converge");
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opts) {
  const double bp[2] = {a, b};
  return integrate(f, std::span<const double>(bp, 2), opts);
}

double tail_window(double beta, double rel_floor) {
  if (!(beta > 0.0)) throw TailBoundError("tail_window: decay rate must be positive");
  return -std::log(rel_floor) / beta;
}

}  // namespace minl2

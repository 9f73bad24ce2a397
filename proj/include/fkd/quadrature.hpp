#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fkd/errors.hpp"

namespace fkd {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  /// Integrate `f` over [a, b] with this rule.
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      sum += weights[i] * f(mid + half * nodes[i]);
    }
    return sum * half;
  }
};

/// Builds an n-point rule by Newton iteration on P_n, seeded with the
/// Chebyshev-like guess cos(pi (i - 1/4) / (n + 1/2)).
inline GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw RangeError("gauss_legendre: need at least one node");
  GaussLegendreRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace detail {

template <class F>
double adaptive_gl_step(const GaussLegendreRule& rule, F& f, double a, double b,
                        double whole, double abs_tol, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = rule.integrate(f, a, mid);
  const double right = rule.integrate(f, mid, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= abs_tol || depth >= max_depth) {
    if (std::abs(refined - whole) > abs_tol) {
      throw ConvergenceError("adaptive Gauss-Legendre: depth cap reached");
    }
    return refined;
  }
  return adaptive_gl_step(rule, f, a, mid, left, 0.5 * abs_tol, depth + 1, max_depth) +
         adaptive_gl_step(rule, f, mid, b, right, 0.5 * abs_tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Gauss-Legendre integration by interval bisection. A panel is
/// accepted when the 20-point value agrees with the sum over its two halves.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-13,
                          int max_depth = 40) {
  static const GaussLegendreRule rule = gauss_legendre(20);
  const double whole = rule.integrate(f, a, b);
  const double scale = std::max(std::abs(whole), 1e-300);
  return detail::adaptive_gl_step(rule, f, a, b, whole, rel_tol * scale, 0, max_depth);
}

}  // namespace fkd

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "stcg/spatial_mesh.hpp"
#include "stcg/types.hpp"

namespace stcg {

/// Points and weights on a reference element: [0,1] for intervals, the
/// triangle {(xi, eta) : xi, eta >= 0, xi + eta <= 1} for triangles.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<Real> weights;
  int degree = 0;

  std::size_t size() const noexcept { return weights.size(); }
};

inline constexpr int kMaxGaussPoints = 64;
inline constexpr int kMaxTriangleDegree = 2 * kMaxGaussPoints - 2;

/// k-point Gauss-Legendre rule on [0,1], exact for degree 2k - 1.
inline QuadratureRule gauss_legendre(int points) {
  if (points < 1 || points > kMaxGaussPoints) {
    throw InvalidArgument("gauss_legendre: unsupported number of points " +
                          std::to_string(points));
  }
  QuadratureRule rule;
  rule.degree = 2 * points - 1;
  rule.points.resize(points);
  rule.weights.resize(points);
  const int n = points;
  // Returns (P_n(x), P_n'(x)) by the three-term recurrence.
  const auto legendre = [n](Real x) {
    Real p0 = 1.0;
    Real p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Real p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::array<Real, 2>{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const Real dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const Real dp = legendre(x)[1];
    const Real w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the upper node of a symmetric pair on [-1,1].
    rule.points[n - 1 - i] = {0.5 * (1.0 + x), 0.0};
    rule.points[i] = {0.5 * (1.0 - x), 0.0};
    rule.weights[n - 1 - i] = 0.5 * w;
    rule.weights[i] = 0.5 * w;
  }
  if (n % 2 == 1) {
    rule.points[n / 2] = {0.5, 0.0};
  }
  return rule;
}

/// Triangle rule exact for the requested degree. Degree <= 5 uses the
/// 7-point symmetric rule; higher degrees use a collapsed Gauss product.
inline QuadratureRule triangle_rule(int degree) {
  if (degree < 0 || degree > kMaxTriangleDegree) {
    throw InvalidArgument("triangle_rule: unsupported degree " + std::to_string(degree));
  }
  QuadratureRule rule;
  if (degree <= 5) {
    const Real s15 = std::sqrt(15.0);
    const Real a1 = (6.0 - s15) / 21.0;
    const Real b1 = (9.0 + 2.0 * s15) / 21.0;
    const Real w1 = (155.0 - s15) / 2400.0;
    const Real a2 = (6.0 + s15) / 21.0;
    const Real b2 = (9.0 - 2.0 * s15) / 21.0;
    const Real w2 = (155.0 + s15) / 2400.0;
    rule.degree = 5;
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}, {a1, a1}, {b1, a1}, {a1, b1},
                   {a2, a2}, {b2, a2}, {a2, b2}};
    rule.weights = {9.0 / 80.0, w1, w1, w1, w2, w2, w2};
    return rule;
  }
  // Duffy map (u, v) -> (u, v (1 - u)) with Jacobian (1 - u); the pulled
  // back integrand has degree degree + 1 in u.
  const int n = (degree + 2) / 2 + 1;
  const QuadratureRule g = gauss_legendre(n);
  rule.degree = degree;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Real u = g.points[i][0];
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Real v = g.points[j][0];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

} // namespace stcg

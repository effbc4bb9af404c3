#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "stcg/quadrature.hpp"

using namespace stcg;

namespace {

Real factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

Real integrate_interval(const QuadratureRule& rule, int power) {
  Real sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    sum += rule.weights[q] * std::pow(rule.points[q][0], power);
  }
  return sum;
}

Real integrate_triangle(const QuadratureRule& rule, int a, int b) {
  Real sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    sum += rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b);
  }
  return sum;
}

} // namespace

TEST(GaussLegendre, OnePoint) {
  const QuadratureRule rule = gauss_legendre(1);
  ASSERT_EQ(rule.size(), 1u);
  EXPECT_DOUBLE_EQ(rule.points[0][0], 0.5);
  EXPECT_DOUBLE_EQ(rule.weights[0], 1.0);
}

TEST(GaussLegendre, FivePointsIntegrateNinthPower) {
  EXPECT_NEAR(integrate_interval(gauss_legendre(5), 9), 0.1, 1e-14);
}

TEST(GaussLegendre, ExactUpToStatedDegree) {
  for (int k = 1; k <= 20; ++k) {
    const QuadratureRule rule = gauss_legendre(k);
    EXPECT_EQ(rule.degree, 2 * k - 1);
    EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 1.0, 1e-14);
    for (int p = 0; p <= rule.degree; ++p) {
      EXPECT_NEAR(integrate_interval(rule, p), 1.0 / (p + 1), 1e-13) << "k=" << k << " p=" << p;
    }
    // First inexact monomial t^{2k}: remainder (k!)^4 / ((2k+1) ((2k)!)^2).
    if (k <= 8) {
      const Real remainder = std::pow(factorial(k), 4) / ((2 * k + 1) * std::pow(factorial(2 * k), 2));
      EXPECT_NEAR(1.0 / (2 * k + 1) - integrate_interval(rule, 2 * k), remainder, 1e-6 * remainder);
    }
  }
}

TEST(GaussLegendre, RejectsUnsupportedOrders) {
  EXPECT_THROW(gauss_legendre(0), InvalidArgument);
  EXPECT_THROW(gauss_legendre(kMaxGaussPoints + 1), InvalidArgument);
}

TEST(TriangleRule, WeightsSumToReferenceArea) {
  for (int degree : {5, 8, 13}) {
    const QuadratureRule rule = triangle_rule(degree);
    EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 0.5, 1e-15);
  }
}

TEST(TriangleRule, ExactForMonomialsUpToDegree) {
  // int_T x^a y^b = a! b! / (a + b + 2)!
  for (int degree : {5, 6, 9, 14}) {
    const QuadratureRule rule = triangle_rule(degree);
    EXPECT_GE(rule.degree, degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        const Real exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        EXPECT_NEAR(integrate_triangle(rule, a, b), exact, 1e-14)
            << "degree=" << degree << " a=" << a << " b=" << b;
      }
    }
  }
}

TEST(TriangleRule, SevenPointRuleInsideReference) {
  const QuadratureRule rule = triangle_rule(5);
  EXPECT_EQ(rule.size(), 7u);
  for (const auto& p : rule.points) {
    EXPECT_GT(p[0], 0.0);
    EXPECT_GT(p[1], 0.0);
    EXPECT_LT(p[0] + p[1], 1.0);
  }
  EXPECT_THROW(triangle_rule(-1), InvalidArgument);
  EXPECT_THROW(triangle_rule(kMaxTriangleDegree + 1), InvalidArgument);
}

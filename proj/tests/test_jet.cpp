#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finsler/jet.hpp"

using finsler::Jet2;

namespace {

using J2 = Jet2<double, 2>;

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Jet2, ProductRuleOnPolynomials) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = U(rng), y = U(rng);
    const J2 X = J2::variable(x, 0), Y = J2::variable(y, 1);
    // f = x^3 y + 2 x y^2 - y
    const J2 f = X * X * X * Y + 2.0 * X * Y * Y - Y;
    EXPECT_LT(rel(f.v, x * x * x * y + 2 * x * y * y - y), 1e-12);
    EXPECT_LT(rel(f.grad(0), 3 * x * x * y + 2 * y * y), 1e-12);
    EXPECT_LT(rel(f.grad(1), x * x * x + 4 * x * y - 1), 1e-12);
    EXPECT_LT(rel(f.hess(0, 0), 6 * x * y), 1e-12);
    EXPECT_LT(rel(f.hess(0, 1), 3 * x * x + 4 * y), 1e-12);
    EXPECT_LT(rel(f.hess(1, 1), 4 * x), 1e-12);
    EXPECT_EQ(f.hess(0, 1), f.hess(1, 0));
  }
}

TEST(Jet2, ChainRuleAndQuotient) {
  const double x = 0.7, y = -0.3;
  const J2 X = J2::variable(x, 0), Y = J2::variable(y, 1);
  // g = sqrt(1 + x^2 y^2) and q = x / (1 + y^2)
  const J2 g = sqrt(1.0 + X * X * Y * Y);
  const double s = std::sqrt(1 + x * x * y * y);
  EXPECT_LT(rel(g.grad(0), x * y * y / s), 1e-12);
  EXPECT_LT(rel(g.grad(1), x * x * y / s), 1e-12);
  const double gxx = y * y / s - x * x * y * y * y * y / (s * s * s);
  EXPECT_LT(rel(g.hess(0, 0), gxx), 1e-12);
  const double gxy = 2 * x * y / s - x * y * y * x * x * y / (s * s * s);
  EXPECT_LT(rel(g.hess(0, 1), gxy), 1e-12);

  const J2 q = X / (1.0 + Y * Y);
  const double d = 1 + y * y;
  EXPECT_LT(rel(q.grad(1), -2 * x * y / (d * d)), 1e-12);
  EXPECT_LT(rel(q.hess(1, 1), x * (6 * y * y - 2) / (d * d * d)), 1e-12);
  EXPECT_LT(rel(q.hess(0, 1), -2 * y / (d * d)), 1e-12);
}

TEST(Jet2, TranscendentalFunctions) {
  const double x = 0.4;
  const auto X = Jet2<double, 1>::variable(x, 0);
  const auto e = exp(sin(X));
  EXPECT_LT(rel(e.grad(0), std::cos(x) * std::exp(std::sin(x))), 1e-12);
  const double h = (std::cos(x) * std::cos(x) - std::sin(x)) * std::exp(std::sin(x));
  EXPECT_LT(rel(e.hess(0, 0), h), 1e-12);
  const auto l = log(cos(X) + 2.0);
  EXPECT_LT(rel(l.grad(0), -std::sin(x) / (std::cos(x) + 2)), 1e-12);
  const auto p = pow(X, 2.5);
  EXPECT_LT(rel(p.hess(0, 0), 2.5 * 1.5 * std::pow(x, 0.5)), 1e-12);
}

TEST(Jet2, NestedJetsGiveHigherDerivatives) {
  // x^5 has third derivative 60 x^2 and fourth 120 x.
  using Inner = Jet2<double, 1>;
  using Outer = Jet2<Inner, 1>;
  const double x = 1.3;
  const Outer X = Outer::variable(Inner::variable(x, 0), 0);
  const Outer f = X * X * X * X * X;
  EXPECT_LT(rel(f.hess(0, 0).v, 20 * std::pow(x, 3)), 1e-12);
  EXPECT_LT(rel(f.hess(0, 0).grad(0), 60 * x * x), 1e-12);
  EXPECT_LT(rel(f.hess(0, 0).hess(0, 0), 120 * x), 1e-12);
  EXPECT_LT(rel(f.grad(0).hess(0, 0), 60 * x * x), 1e-12);
}

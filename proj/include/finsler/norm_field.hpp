#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/types.hpp"

namespace finsler {

enum class Family { riemannian, randers, smoothed_p, custom };
enum class ChartKind { plane, torus, interval };

std::string to_string(Family f);
std::string to_string(ChartKind c);
Family family_from_string(const std::string& s);
ChartKind chart_from_string(const std::string& s);

/// Flat coordinate domain. Plane charts use half_width only as a sampling box.
template <int n>
struct Chart {
  ChartKind kind = ChartKind::plane;
  Point<n> periods = Point<n>::Constant(2.0 * std::numbers::pi);
  double half_width = 1.0;

  bool contains(const Point<n>& x) const {
    if (kind != ChartKind::interval) return true;
    return x.cwiseAbs().maxCoeff() <= half_width;
  }

  /// Roughly `count` points spread over the chart (a tensor grid).
  std::vector<Point<n>> sample_points(int count) const {
    int per_axis = 1;
    while (std::pow(per_axis + 1, n) <= count) ++per_axis;
    std::vector<Point<n>> pts;
    int total = 1;
    for (int i = 0; i < n; ++i) total *= per_axis;
    for (int idx = 0; idx < total; ++idx) {
      Point<n> x;
      int r = idx;
      for (int i = 0; i < n; ++i) {
        const int k = r % per_axis;
        r /= per_axis;
        if (kind == ChartKind::torus)
          x[i] = periods[i] * k / per_axis;
        else
          x[i] = -half_width + 2.0 * half_width * (k + 0.5) / per_axis;
      }
      pts.push_back(x);
    }
    return pts;
  }
};

/// Analytic Finsler structure F(x, v) on a flat chart, with weight phi so that
/// dm = exp(phi) dx.
///
///   riemannian: e^lambda sqrt(v^T a0 v)
///   randers:    e^lambda sqrt(v^T a0 v) + b(x).v
///   smoothed_p: e^lambda (sum_i (v_i^2 + eps^2 |v|^2)^(p/2))^(1/p)
///   custom:     e^lambda P(a0 v) + b(x).v, P the smoothed p-norm above
template <int n>
struct NormField {
  Family family = Family::riemannian;
  Mat<double, n> a0 = Mat<double, n>::Identity();
  ScalarExpr<n> lambda;
  std::array<ScalarExpr<n>, n> b{};
  double p = 4.0;
  double eps = 0.1;
  ScalarExpr<n> phi;
  Chart<n> chart;

  bool has_drift() const {
    return family == Family::randers || family == Family::custom;
  }

  template <class S>
  S operator()(const Vec<S, n>& x, const Vec<S, n>& v) const {
    S base;
    if (family == Family::riemannian || family == Family::randers) {
      base = sqrt(quad_form<S, n>(a0.template cast<S>(), v, v));
    } else {
      Vec<S, n> w = v;
      if (family == Family::custom) w = mat_vec<S, n>(a0.template cast<S>(), v);
      S s2(0.0);
      for (int i = 0; i < n; ++i) s2 += w[i] * w[i];
      S acc(0.0);
      for (int i = 0; i < n; ++i)
        acc += pow(w[i] * w[i] + s2 * (eps * eps), 0.5 * p);
      base = pow(acc, 1.0 / p);
    }
    if (!lambda.is_constant() || lambda.c0 != 0.0) base = base * exp(lambda(x));
    if (has_drift())
      for (int i = 0; i < n; ++i) {
        if (b[i].is_constant() && b[i].c0 == 0.0) continue;
        base += b[i](x) * v[i];
      }
    return base;
  }

  double F(const Point<n>& x, const Point<n>& v) const { return (*this)(x, v); }

  Point<n> drift(const Point<n>& x) const {
    Point<n> r = Point<n>::Zero();
    if (has_drift())
      for (int i = 0; i < n; ++i) r[i] = b[i](x);
    return r;
  }

  /// True when F does not depend on x (a Minkowski norm on the chart).
  bool is_minkowski() const {
    if (!lambda.is_constant()) return false;
    if (has_drift())
      for (const auto& bi : b)
        if (!bi.is_constant()) return false;
    return true;
  }

  /// Throws InvalidNorm when the parameters cannot define a Finsler structure.
  void validate() const {
    Eigen::SelfAdjointEigenSolver<Mat<double, n>> es(0.5 * (a0 + a0.transpose()));
    if (family != Family::custom && es.eigenvalues().minCoeff() <= 0.0)
      throw InvalidNorm("a0 must be positive-definite");
    if (family == Family::custom && std::abs(a0.determinant()) < 1e-14)
      throw InvalidNorm("a0 must be invertible");
    if ((family == Family::smoothed_p || family == Family::custom) &&
        (p < 2.0 || eps <= 0.0))
      throw InvalidNorm("smoothed p-norm needs p >= 2 and eps > 0");
    if (!has_drift())
      for (const auto& bi : b)
        if (!(bi == ScalarExpr<n>{}))
          throw InvalidNorm("drift b is only allowed for randers/custom");
    if (family == Family::randers) {
      const Mat<double, n> ainv = a0.inverse();
      for (const auto& x : chart.sample_points(256)) {
        const Point<n> bx = drift(x);
        const double nb = std::sqrt(bx.dot(ainv * bx)) * std::exp(-lambda(x));
        if (!(nb < 1.0)) throw InvalidNorm("randers drift must satisfy |b|_a < 1");
      }
    }
  }

  static NormField euclidean() { return NormField{}; }

  static NormField randers(const Point<n>& bconst,
                           const Mat<double, n>& a = Mat<double, n>::Identity()) {
    NormField f;
    f.family = Family::randers;
    f.a0 = a;
    for (int i = 0; i < n; ++i) f.b[i] = ScalarExpr<n>::constant(bconst[i]);
    return f;
  }

  static NormField smoothed(double p, double eps) {
    NormField f;
    f.family = Family::smoothed_p;
    f.p = p;
    f.eps = eps;
    return f;
  }

  /// e^{2 lambda} delta.
  static NormField conformal(const ScalarExpr<n>& lam) {
    NormField f;
    f.lambda = lam;
    return f;
  }
};

/// Reverse structure F<-(x, v) = F(x, -v).
template <int n>
NormField<n> reverse(const NormField<n>& f) {
  NormField<n> r = f;
  if (r.has_drift())
    for (auto& bi : r.b) bi = -bi;
  return r;
}

}  // namespace finsler

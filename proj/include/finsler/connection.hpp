#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "finsler/minkowski.hpp"

namespace finsler {

/// Connection coefficients at (x, v), v != 0. Index conventions:
/// gamma[i][j][k] = gamma^i_jk, N(i, j) = N^i_j, Gamma[i][j][k] = Gamma^i_jk.
template <int n>
struct ConnectionData {
  Tensor3<double, n> gamma{};
  Point<n> G = Point<n>::Zero();
  Mat<double, n> N = Mat<double, n>::Zero();
  Tensor3<double, n> Gamma{};
  // By-products used by callers.
  Mat<double, n> g = Mat<double, n>::Identity();
  Mat<double, n> ginv = Mat<double, n>::Identity();
  Tensor3<double, n> A{};
  Point<n> G_from_gamma = Point<n>::Zero();
};

/// Spray coefficients G^i(x, v) = g^il (L_{v^l x^k} v^k - L_{x^l}) with
/// L = F^2/2, so that geodesics solve x'' + G(x') = 0. Generic in S so that
/// derivatives of G come from jets.
template <int n, class S>
Vec<S, n> spray(const NormField<n>& N, const Vec<S, n>& x, const Vec<S, n>& v) {
  using J = Jet2<S, 2 * n>;
  Vec<J, n> xj, vj;
  for (int i = 0; i < n; ++i) {
    xj[i] = J::variable(x[i], i);
    vj[i] = J::variable(v[i], n + i);
  }
  const J f = N(xj, vj);
  const J L = f * f * 0.5;
  Mat<S, n> g;
  Vec<S, n> rhs;
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) g(l, m) = L.hess(n + l, n + m);
    S r = -L.grad(l);
    for (int k = 0; k < n; ++k) r += L.hess(n + l, k) * v[k];
    rhs[l] = r;
  }
  return mat_vec<S, n>(inverse<S, n>(g), rhs);
}

/// gamma, G, N and the Chern connection Gamma at (x, v).
template <int n>
ConnectionData<n> connection(const NormField<n>& Nf, const PointArg<n>& x, const PointArg<n>& v) {
  if (is_zero_vector(v)) throw ZeroVector();
  using J = Jet2<double, 2 * n>;
  Vec<J, n> xj, vj;
  for (int i = 0; i < n; ++i) {
    xj[i] = J::variable(x[i], i);
    vj[i] = J::variable(v[i], n + i);
  }
  const auto gj = vertical<n, J>(Nf, xj, vj).g;
  const Vec<J, n> Gj = spray<n, J>(Nf, xj, vj);

  ConnectionData<n> c;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.g(i, j) = gj(i, j).v;
  c.ginv = c.g.inverse();
  const double F = Nf.F(x, v);

  // dg[l][k][j] = d g_lk / d x^j, vg[l][k][j] = d g_lk / d v^j.
  Tensor3<double, n> dg, vg;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        dg[l][k][j] = gj(l, k).grad(j);
        vg[l][k][j] = gj(l, k).grad(n + j);
      }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += c.ginv(i, l) * (dg[l][k][j] + dg[j][l][k] - dg[j][k][l]);
        c.gamma[i][j][k] = 0.5 * s;
        c.A[i][j][k] = 0.5 * F * vg[i][j][k];
      }

  for (int i = 0; i < n; ++i) {
    c.G[i] = Gj[i].v;
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += c.gamma[i][j][k] * v[j] * v[k];
    c.G_from_gamma[i] = s;
    for (int j = 0; j < n; ++j) c.N(i, j) = 0.5 * Gj[i].grad(n + j);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double corr = 0.0;
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            corr += c.ginv(i, l) *
                    (c.A[l][k][m] * c.N(m, j) + c.A[j][l][m] * c.N(m, k) - c.A[j][k][m] * c.N(m, l));
        c.Gamma[i][j][k] = c.gamma[i][j][k] - corr / F;
      }
  return c;
}

/// Covariant derivative D_v^w X at x, given X(x) and its Jacobian dX(i, j) = dX^i/dx^j.
template <int n>
Point<n> covariant_derivative(const ConnectionData<n>& cw, const PointArg<n>& v,
                              const PointArg<n>& X, const Mat<double, n>& dX) {
  Point<n> r = dX * v;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r[i] += cw.Gamma[i][j][k] * v[j] * X[k];
  return r;
}

/// Trace of the Riemann curvature endomorphism built from the spray,
///   R^i_k = 2 dG^i/dx^k - v^j d2G^i/dx^j dv^k + 2 G^j d2G^i/dv^j dv^k
///           - dG^i/dv^j dG^j/dv^k
/// written for the half-spray G/2 (the convention of Shen's coordinate formula).
template <int n>
double ricci(const NormField<n>& Nf, const PointArg<n>& x, const PointArg<n>& v) {
  if (is_zero_vector(v)) throw ZeroVector();
  using J = Jet2<double, 2 * n>;
  Vec<J, n> xj, vj;
  for (int i = 0; i < n; ++i) {
    xj[i] = J::variable(x[i], i);
    vj[i] = J::variable(v[i], n + i);
  }
  Vec<J, n> G = spray<n, J>(Nf, xj, vj);
  for (int i = 0; i < n; ++i) G[i] = G[i] * 0.5;
  double ric = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i;
    double r = 2.0 * G[i].grad(k);
    for (int j = 0; j < n; ++j) {
      r -= v[j] * G[i].hess(j, n + k);
      r += 2.0 * G[j].v * G[i].hess(n + j, n + k);
      r -= G[i].grad(n + j) * G[j].grad(n + k);
    }
    ric += r;
  }
  return ric;
}

template <int n>
struct GeodesicState {
  Point<n> x;
  Point<n> v;
  double t = 0.0;
};

/// Classical RK4 for x'' + G(x') = 0 (dt may be negative to integrate backwards).
template <int n>
std::vector<GeodesicState<n>> geodesic_shoot(const NormField<n>& Nf, const PointArg<n>& x0,
                                             const PointArg<n>& v0, double T, double dt) {
  if (is_zero_vector(v0)) throw ZeroVector();
  const int steps = std::max(1, static_cast<int>(std::llround(std::abs(T / dt))));
  const double h = T / steps;
  auto acc = [&](const Point<n>& x, const Point<n>& v) -> Point<n> {
    return -spray<n, double>(Nf, x, v);
  };
  std::vector<GeodesicState<n>> out;
  out.reserve(steps + 1);
  Point<n> x = x0, v = v0;
  out.push_back({x, v, 0.0});
  for (int s = 0; s < steps; ++s) {
    const Point<n> k1x = v, k1v = acc(x, v);
    const Point<n> k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, k2x);
    const Point<n> k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, k3x);
    const Point<n> k4x = v + h * k3v, k4v = acc(x + h * k3x, k4x);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (!Nf.chart.contains(x)) throw LeftChart();
    out.push_back({x, v, (s + 1) * h});
  }
  return out;
}

inline constexpr double kInfiniteN = std::numeric_limits<double>::infinity();

/// Derivatives of Psi(eta(t)) = (1/2) log det g(eta', eta') - Phi(eta) at t = 0
/// along the geodesic with eta'(0) = v.
template <int n>
std::pair<double, double> psi_derivatives(const NormField<n>& Nf, const PointArg<n>& x,
                                          const PointArg<n>& v, double h = 1e-3) {
  auto psi_at = [&](double t) {
    Point<n> y = x, w = v;
    if (t != 0.0) {
      const auto traj = geodesic_shoot(Nf, x, v, t, h / 8.0);
      y = traj.back().x;
      w = traj.back().v;
    }
    const Mat<double, n> g = vertical<n, double>(Nf, y, w).g;
    return 0.5 * std::log(g.determinant()) - Nf.phi(y);
  };
  const double p0 = psi_at(0.0);
  const double p1 = psi_at(h), m1 = psi_at(-h);
  const double p2 = psi_at(2 * h), m2 = psi_at(-2 * h);
  // Central differences at steps h and 2h, combined by Richardson extrapolation.
  const double d1h = (p1 - m1) / (2 * h), d1H = (p2 - m2) / (4 * h);
  const double d2h = (p1 - 2 * p0 + m1) / (h * h), d2H = (p2 - 2 * p0 + m2) / (4 * h * h);
  return {(4 * d1h - d1H) / 3.0, (4 * d2h - d2H) / 3.0};
}

/// Weighted Ricci curvature Ric_N(v) for N in (-inf, 0) U [n, inf]; pass
/// kInfiniteN for Ric_infinity. Computed at v/F(v) and rescaled by F(v)^2.
template <int n>
double weighted_ricci(const NormField<n>& Nf, const PointArg<n>& x, const PointArg<n>& v,
                      double Nparam, double h = 1e-3) {
  if (is_zero_vector(v)) throw ZeroVector();
  if (!(Nparam < 0.0 || Nparam >= n)) throw BadN();
  const double F = Nf.F(x, v);
  const Point<n> u = v / F;
  const auto [d1, d2] = psi_derivatives(Nf, x, u, h);
  double r = ricci(Nf, x, u) + d2;
  if (std::isfinite(Nparam)) {
    if (Nparam == n)
      r = std::abs(d1) < 1e-9 ? r : -std::numeric_limits<double>::infinity();
    else
      r -= d1 * d1 / (Nparam - n);
  }
  return F * F * r;
}

}  // namespace finsler

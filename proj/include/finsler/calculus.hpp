#pragma once

// Gradient, Hessian and Laplacian of analytic scalar fields, and the pointwise
// terms of the Bochner-Weitzenboeck formula.

#include <cmath>

#include "finsler/connection.hpp"

namespace finsler {

template <int n>
using ScalarField = ScalarExpr<n>;

/// Points with F(grad u) below this are treated as critical.
inline constexpr double kCriticalTol = 1e-8;

/// Du(x).
template <int n>
Point<n> differential(const ScalarField<n>& u, const PointArg<n>& x) {
  using J = Jet2<double, n>;
  Vec<J, n> xj;
  for (int i = 0; i < n; ++i) xj[i] = J::variable(x[i], i);
  const J r = u(xj);
  Point<n> d;
  for (int i = 0; i < n; ++i) d[i] = r.grad(i);
  return d;
}

/// Gradient L*(Du(x)); zero at critical points.
template <int n>
Point<n> gradient(const NormField<n>& N, const ScalarField<n>& u, const PointArg<n>& x) {
  return legendre(N, x, differential(u, x));
}

/// The gradient field as second-order jets in x: value, first and second
/// partials of each component of L*(Du)(x).
template <int n>
struct GradientJet {
  using T = Jet2<double, n>;
  Vec<T, n> x;
  Vec<T, n> Du;
  Vec<T, n> V;

  Point<n> value() const { return values<T, n>(V); }
  /// dV^i/dx^j.
  Mat<double, n> jacobian() const {
    Mat<double, n> m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = V[i].grad(j);
    return m;
  }
};

template <int n>
GradientJet<n> gradient_jet(const NormField<n>& N, const ScalarField<n>& u, const PointArg<n>& x) {
  using T = Jet2<double, n>;
  using O = Jet2<T, n>;
  GradientJet<n> r;
  Vec<O, n> xo;
  for (int i = 0; i < n; ++i) {
    r.x[i] = T::variable(x[i], i);
    xo[i] = O::variable(r.x[i], i);
  }
  const O uo = u(xo);
  for (int i = 0; i < n; ++i) r.Du[i] = uo.grad(i);
  r.V = legendre_jet<n, T>(N, r.x, r.Du);
  return r;
}

/// Hessian endomorphism of u at x as the matrix of v -> D_v^{grad u} grad u.
template <int n>
Mat<double, n> hessian(const NormField<n>& N, const ScalarField<n>& u, const PointArg<n>& x) {
  const auto gj = gradient_jet(N, u, x);
  const Point<n> V = gj.value();
  if (is_zero_vector(V) || N.F(x, V) < kCriticalTol) throw CriticalPoint();
  const auto c = connection(N, x, V);
  Mat<double, n> A = gj.jacobian();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) A(i, j) += c.Gamma[i][j][k] * V[k];
  return A;
}

/// Nonlinear Laplacian div_m(grad u) at x.
template <int n>
double laplacian(const NormField<n>& N, const ScalarField<n>& u, const PointArg<n>& x) {
  const auto gj = gradient_jet(N, u, x);
  const Jet2<double, n> phi = N.phi(gj.x);
  double r = 0.0;
  for (int i = 0; i < n; ++i) r += gj.V[i].grad(i) + gj.V[i].v * phi.grad(i);
  return r;
}

/// Hilbert-Schmidt norm squared of an endomorphism A with respect to g:
/// tr(g^{-1} A^T g A).
template <int n>
double hs_norm_sq(const Mat<double, n>& A, const Mat<double, n>& g) {
  return (g.inverse() * A.transpose() * g * A).trace();
}

/// Same quantity through the eigenvalues of the g-symmetrization of A.
template <int n>
double hs_norm_sq_eigen(const Mat<double, n>& A, const Mat<double, n>& g) {
  // B = g^{1/2} A g^{-1/2} is symmetric exactly when A is g-symmetric.
  Eigen::SelfAdjointEigenSolver<Mat<double, n>> es(g);
  const Mat<double, n> root = es.operatorSqrt();
  const Mat<double, n> iroot = es.operatorInverseSqrt();
  const Mat<double, n> B = root * A * iroot;
  const Mat<double, n> Bs = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Mat<double, n>> eb(Bs, Eigen::EigenvaluesOnly);
  return eb.eigenvalues().squaredNorm();
}

/// Pointwise ingredients of the Bochner-Weitzenboeck formula at a point of M_u.
template <int n>
struct BochnerTerms {
  Point<n> x;
  Point<n> V;                 // grad u
  double F = 0.0;             // F(grad u)
  double laplacian = 0.0;     // Delta u
  double lin_lap = 0.0;       // Delta^{grad u} [F^2(grad u)/2]
  double d_lap = 0.0;         // D[Delta u](grad u)
  double lhs = 0.0;           // lin_lap - d_lap
  double ric_inf = 0.0;       // Ric_infinity(grad u)
  double hs = 0.0;            // |Hess u|^2_HS, direct contraction
  double hs_eigen = 0.0;      // same through eigenvalues
  double hess_asym = 0.0;     // max |g(Av, w) - g(v, Aw)| over unit basis pairs
  double grad_F_sq = 0.0;     // D[F(grad u)](grad^{grad u} F(grad u))
  double aux_lhs = 0.0;       // 4 F^2 |Hess u|^2_HS
  double aux_rhs = 0.0;       // D[F^2](grad^{grad u} F^2)
  Mat<double, n> hessian = Mat<double, n>::Zero();
  Mat<double, n> g = Mat<double, n>::Identity();
};

/// All terms at x; throws CriticalPoint off M_u.
template <int n>
BochnerTerms<n> bochner_terms(const NormField<n>& N, const ScalarField<n>& u,
                              const PointArg<n>& x) {
  using T = Jet2<double, n>;
  const auto gj = gradient_jet(N, u, x);
  BochnerTerms<n> b;
  b.x = x;
  b.V = gj.value();
  if (is_zero_vector(b.V)) throw CriticalPoint();
  b.F = N.F(x, b.V);
  if (b.F < kCriticalTol) throw CriticalPoint();

  const T phi = N.phi(gj.x);
  // Delta u and its differential.
  T lap(0.0);
  for (int i = 0; i < n; ++i) {
    lap.v += gj.V[i].grad(i) + gj.V[i].v * phi.grad(i);
    for (int k = 0; k < n; ++k)
      lap.d[k] += gj.V[i].hess(i, k) + gj.V[i].grad(k) * phi.grad(i) +
                  gj.V[i].v * phi.hess(i, k);
  }
  b.laplacian = lap.v;
  for (int k = 0; k < n; ++k) b.d_lap += lap.d[k] * b.V[k];

  // Frozen coefficients C = g*(Du) = g(grad u)^{-1} as fields of x.
  const auto vj = vertical<n, T>(N, gj.x, gj.V);
  const Mat<T, n> C = inverse<T, n>(vj.g);
  const T f = vj.L;  // F^2(grad u)/2
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double dj = f.grad(j);
      b.lin_lap += C(i, j).grad(i) * dj + C(i, j).v * f.hess(i, j) + C(i, j).v * dj * phi.grad(i);
    }
  }
  b.lhs = b.lin_lap - b.d_lap;

  b.ric_inf = weighted_ricci(N, x, b.V, kInfiniteN);

  const auto c = connection(N, x, b.V);
  b.g = c.g;
  Mat<double, n> A = gj.jacobian();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) A(i, j) += c.Gamma[i][j][k] * b.V[k];
  b.hessian = A;
  b.hs = hs_norm_sq<n>(A, c.g);
  b.hs_eigen = hs_norm_sq_eigen<n>(A, c.g);
  const Mat<double, n> S = c.g * A;
  b.hess_asym = (S - S.transpose()).cwiseAbs().maxCoeff();

  // F(grad u) as a field: F = sqrt(2 f).
  Point<n> dF;
  for (int i = 0; i < n; ++i) dF[i] = f.grad(i) / b.F;
  Mat<double, n> C0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C0(i, j) = C(i, j).v;
  b.grad_F_sq = dF.dot(C0 * dF);
  b.aux_lhs = 4.0 * b.F * b.F * b.hs;
  const Point<n> dF2 = 2.0 * b.F * dF;
  b.aux_rhs = dF2.dot(C0 * dF2);
  return b;
}

}  // namespace finsler

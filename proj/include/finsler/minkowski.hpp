#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "finsler/norm_field.hpp"

namespace finsler {

inline constexpr double kZeroVectorTol = 1e-14;

template <class Derived>
bool is_zero_vector(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().maxCoeff() < kZeroVectorTol;
}

/// L = F^2/2 with its first and second vertical derivatives.
template <class S, int n>
struct VerticalJet {
  S L;
  Vec<S, n> Lv;
  Mat<S, n> g;
};

template <int n, class S>
VerticalJet<S, n> vertical(const NormField<n>& N, const Vec<S, n>& x, const Vec<S, n>& v) {
  using J = Jet2<S, n>;
  Vec<J, n> xj, vj;
  for (int i = 0; i < n; ++i) {
    xj[i] = J(x[i]);
    vj[i] = J::variable(v[i], i);
  }
  const J f = N(xj, vj);
  const J L = f * f * 0.5;
  VerticalJet<S, n> r;
  r.L = L.v;
  for (int i = 0; i < n; ++i) {
    r.Lv[i] = L.grad(i);
    for (int j = 0; j < n; ++j) r.g(i, j) = L.hess(i, j);
  }
  return r;
}

/// Fundamental tensor g_ij(x, v) = (1/2) d^2 F^2 / dv^i dv^j.
template <int n>
Mat<double, n> metric_tensor(const NormField<n>& N, const PointArg<n>& x, const PointArg<n>& v) {
  if (is_zero_vector(v)) throw ZeroVector();
  const Mat<double, n> g = vertical<n, double>(N, x, v).g;
  Eigen::SelfAdjointEigenSolver<Mat<double, n>> es(g, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw NotConvex();
  return g;
}

/// Cartan tensor A_ijk = (F/2) dg_ij/dv^k.
template <int n>
Tensor3<double, n> cartan_tensor(const NormField<n>& N, const PointArg<n>& x, const PointArg<n>& v) {
  if (is_zero_vector(v)) throw ZeroVector();
  using J = Jet2<double, n>;
  Vec<J, n> xj, vj;
  for (int i = 0; i < n; ++i) {
    xj[i] = J(x[i]);
    vj[i] = J::variable(v[i], i);
  }
  const auto vjet = vertical<n, J>(N, xj, vj);
  const double F = N.F(x, v);
  Tensor3<double, n> A;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) A[i][j][k] = 0.5 * F * vjet.g(i, j).grad(k);
  return A;
}

struct LegendreOptions {
  int max_iter = 50;
  double tol = 1e-12;
};

/// Legendre transform L*(alpha): the v with g_v(v, .) = alpha, found by damped
/// Newton on the strictly convex function F^2(v)/2 - alpha(v).
template <int n>
Point<n> legendre(const NormField<n>& N, const PointArg<n>& x, const PointArg<n>& alpha,
                  const LegendreOptions& opt = {}) {
  if (is_zero_vector(alpha)) return Point<n>::Zero();
  const double an = alpha.norm();
  const double fa = N.F(x, alpha);
  Point<n> v = alpha * (an * an / (fa * fa));
  auto objective = [&](const Point<n>& w) {
    const double f = N.F(x, w);
    return 0.5 * f * f - alpha.dot(w);
  };
  for (int it = 0; it < opt.max_iter; ++it) {
    const auto vj = vertical<n, double>(N, x, v);
    const Point<n> grad = vj.Lv - alpha;
    const auto ldlt = vj.g.ldlt();
    // A non-convex Hessian means F is not a Minkowski norm at x.
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(N.F(x, v) > 0.0))
      throw NoConvergence("legendre: objective is not strictly convex");
    if (grad.norm() <= opt.tol * an) return v;
    const Point<n> step = -ldlt.solve(grad);
    const double f0 = vj.L - alpha.dot(v);
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(f0);
    double s = 1.0;
    while (s > 1e-12 && !(objective(v + s * step) <= f0 + slack)) s *= 0.5;
    v += s * step;
  }
  const auto vj = vertical<n, double>(N, x, v);
  if ((vj.Lv - alpha).norm() <= opt.tol * an) return v;
  throw NoConvergence("legendre: Newton did not converge");
}

/// Legendre transform on jet inputs: the double solution refined by Newton
/// steps carried out in S arithmetic, which propagates the derivatives of the
/// implicit solution exactly up to the jet order.
template <int n, class S>
Vec<S, n> legendre_jet(const NormField<n>& N, const Vec<S, n>& x, const Vec<S, n>& alpha,
                       int refinements = 3) {
  const Point<n> a0 = values<S, n>(alpha);
  Vec<S, n> v;
  if (is_zero_vector(a0)) {
    for (int i = 0; i < n; ++i) v[i] = S(0.0);
    return v;
  }
  v = constant_vec<S, n>(legendre(N, values<S, n>(x), a0));
  for (int r = 0; r < refinements; ++r) {
    const auto vj = vertical<n, S>(N, x, v);
    const Mat<S, n> ginv = inverse<S, n>(vj.g);
    Vec<S, n> res;
    for (int i = 0; i < n; ++i) res[i] = vj.Lv[i] - alpha[i];
    const Vec<S, n> dv = mat_vec<S, n>(ginv, res);
    for (int i = 0; i < n; ++i) v[i] -= dv[i];
  }
  return v;
}

/// Dual norm F*(alpha) = F(L*(alpha)).
template <int n>
double dual_norm(const NormField<n>& N, const PointArg<n>& x, const PointArg<n>& alpha,
                 const LegendreOptions& opt = {}) {
  if (is_zero_vector(alpha)) return 0.0;
  return N.F(x, legendre(N, x, alpha, opt));
}

/// Inverse Legendre map L(v) = g_v(v, .) = dL/dv.
template <int n>
Point<n> legendre_inverse(const NormField<n>& N, const PointArg<n>& x, const PointArg<n>& v) {
  if (is_zero_vector(v)) return Point<n>::Zero();
  return vertical<n, double>(N, x, v).Lv;
}

struct SmoothnessOptions {
  int chart_points = 64;
  int directions = 256;
  int refinements = 5;
};

template <int n>
struct SmoothnessConstants {
  double S_F = 1.0;
  double C_F = 1.0;
  double Lambda_F = 1.0;
  // Argmax witnesses.
  Point<n> S_x, S_v, S_w;
  Point<n> C_x, C_v, C_w;
  Point<n> L_x, L_v;
  SmoothnessOptions resolution;
};

namespace detail {

template <int n>
std::vector<Point<n>> sphere_directions(int count) {
  std::vector<Point<n>> dirs;
  if constexpr (n == 1) {
    dirs.push_back(Point<n>::Constant(1.0));
    dirs.push_back(Point<n>::Constant(-1.0));
  } else if constexpr (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      dirs.push_back(Point<n>(std::cos(t), std::sin(t)));
    }
  } else {
    // Fibonacci lattice.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      Point<n> d = Point<n>::Zero();
      d[0] = r * std::cos(golden * k);
      d[1] = r * std::sin(golden * k);
      d[2] = z;
      dirs.push_back(d);
    }
  }
  return dirs;
}

// Small perturbations of a direction inside its tangent space.
template <int n>
std::vector<Point<n>> perturbations(const Point<n>& u, double step) {
  std::vector<Point<n>> out;
  if constexpr (n == 2) {
    const double t = std::atan2(u[1], u[0]);
    for (int k = -4; k <= 4; ++k)
      out.push_back(Point<n>(std::cos(t + k * step), std::sin(t + k * step)));
  } else if constexpr (n == 3) {
    Point<n> a = std::abs(u[0]) < 0.9 ? Point<n>(1, 0, 0) : Point<n>(0, 1, 0);
    const Point<n> u1 = u.normalized();
    Point<n> t1 = (a - a.dot(u1) * u1).normalized();
    Point<n> t2 = u1.cross(t1);
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j)
        out.push_back((u1 + i * step * t1 + j * step * t2).normalized());
  } else {
    out.push_back(u);
  }
  return out;
}

}  // namespace detail

/// Sampled lower estimates of
///   S_F = sup g_v(w,w)/F(w)^2, C_F = sup F(w)^2/g_v(w,w), Lambda_F = sup F(v)/F(-v)
/// over chart points and pairs of directions, followed by local refinement
/// around the best pairs. The results are lower bounds of the true sups.
template <int n>
SmoothnessConstants<n> smoothness_constants(const NormField<n>& N,
                                            const SmoothnessOptions& opt = {}) {
  SmoothnessConstants<n> out;
  out.resolution = opt;
  out.S_F = out.C_F = out.Lambda_F = 0.0;
  std::vector<Point<n>> xs =
      N.is_minkowski() ? std::vector<Point<n>>{Point<n>::Zero()}
                       : N.chart.sample_points(opt.chart_points);
  const auto dirs = detail::sphere_directions<n>(opt.directions);
  const double step0 = 2.0 * std::numbers::pi / std::max(opt.directions, 1);

  auto ratio = [&](const PointArg<n>& x, const Mat<double, n>& g, const Point<n>& w) {
    const double f = N.F(x, w);
    return w.dot(g * w) / (f * f);
  };

  for (const auto& x : xs) {
    std::vector<Mat<double, n>> gs;
    gs.reserve(dirs.size());
    for (const auto& u : dirs) gs.push_back(metric_tensor(N, x, u));
    for (size_t k = 0; k < dirs.size(); ++k) {
      const double fm = N.F(x, -dirs[k]);
      const double lam = N.F(x, dirs[k]) / fm;
      if (lam > out.Lambda_F) {
        out.Lambda_F = lam;
        out.L_x = x;
        out.L_v = dirs[k];
      }
      for (size_t l = 0; l < dirs.size(); ++l) {
        const double r = ratio(x, gs[k], dirs[l]);
        if (r > out.S_F) {
          out.S_F = r;
          out.S_x = x, out.S_v = dirs[k], out.S_w = dirs[l];
        }
        if (1.0 / r > out.C_F) {
          out.C_F = 1.0 / r;
          out.C_x = x, out.C_v = dirs[k], out.C_w = dirs[l];
        }
      }
    }
  }

  // Alternating local refinement of the witnesses.
  double step = step0;
  for (int round = 0; round < opt.refinements; ++round) {
    step *= 0.25;
    for (const auto& v : detail::perturbations<n>(out.S_v, step)) {
      const auto g = metric_tensor(N, out.S_x, v);
      for (const auto& w : detail::perturbations<n>(out.S_w, step)) {
        const double r = ratio(out.S_x, g, w);
        if (r > out.S_F) out.S_F = r, out.S_v = v, out.S_w = w;
      }
    }
    for (const auto& v : detail::perturbations<n>(out.C_v, step)) {
      const auto g = metric_tensor(N, out.C_x, v);
      for (const auto& w : detail::perturbations<n>(out.C_w, step)) {
        const double r = 1.0 / ratio(out.C_x, g, w);
        if (r > out.C_F) out.C_F = r, out.C_v = v, out.C_w = w;
      }
    }
    for (const auto& v : detail::perturbations<n>(out.L_v, step)) {
      const double lam = N.F(out.L_x, v) / N.F(out.L_x, -v);
      if (lam > out.Lambda_F) out.Lambda_F = lam, out.L_v = v;
    }
  }
  return out;
}

}  // namespace finsler

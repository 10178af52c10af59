#pragma once

// Benchmark structures shared by the tests, the acceptance run and the CLI.

#include <cmath>
#include <numbers>

#include "finsler/norm_field.hpp"

namespace finsler::models {

/// Half-width of the interval carrying the K-Gaussian with tail mass < 1e-8.
inline double gaussian_half_width(double K) { return 6.0 / std::sqrt(K); }

/// 2D torus of period 2 pi with drift b = amp (sin x2, cos x1) and a mild weight.
inline NormField<2> randers_torus(double amp = 0.3, double phi_amp = 0.2) {
  NormField<2> f;
  f.family = Family::randers;
  f.chart.kind = ChartKind::torus;
  f.b[0].add_mode(amp, Point<2>(0.0, 1.0));
  f.b[1].add_mode(amp, Point<2>(1.0, 0.0), std::numbers::pi / 2);
  if (phi_amp != 0.0) f.phi.add_mode(phi_amp, Point<2>(1.0, 1.0));
  return f;
}

/// Conformal metric e^{2 lambda} delta on the torus, lambda = amp sin x1.
inline NormField<2> conformal_torus(double amp = 0.1) {
  ScalarExpr<2> lam;
  lam.add_mode(amp, Point<2>(1.0, 0.0));
  NormField<2> f = NormField<2>::conformal(lam);
  f.chart.kind = ChartKind::torus;
  return f;
}

/// Potential -K|x|^2/2 in dimension n.
template <int n>
ScalarExpr<n> gaussian_potential(double K) {
  ScalarExpr<n> phi;
  phi.quad = -K * Mat<double, n>::Identity();
  return phi;
}

/// Euclidean line with the K-Gaussian measure, truncated to an interval.
inline NormField<1> gaussian_line(double K = 1.0) {
  NormField<1> f;
  f.phi = gaussian_potential<1>(K);
  f.chart.kind = ChartKind::interval;
  f.chart.half_width = gaussian_half_width(K);
  return f;
}

/// Asymmetric norm on the line with F(1) = f_plus and F(-1) = f_minus,
/// written as the Randers structure a|v| + b v, with the K-Gaussian measure.
inline NormField<1> asymmetric_line(double K = 1.0, double f_plus = 1.0, double f_minus = 2.0) {
  NormField<1> f;
  f.family = Family::randers;
  const double a = 0.5 * (f_plus + f_minus);
  f.a0(0, 0) = a * a;
  f.b[0] = ScalarExpr<1>::constant(0.5 * (f_plus - f_minus));
  f.phi = gaussian_potential<1>(K);
  f.chart.kind = ChartKind::interval;
  f.chart.half_width = gaussian_half_width(K);
  return f;
}

/// Circle of length 2 pi with the Euclidean norm and Lebesgue measure.
inline NormField<1> euclidean_circle() {
  NormField<1> f;
  f.chart.kind = ChartKind::torus;
  return f;
}

/// Plane with a constant Randers drift and the K-Gaussian measure.
inline NormField<2> randers_gaussian_plane(double K = 1.0, const Point<2>& b = Point<2>(0.1, 0.05)) {
  NormField<2> f = NormField<2>::randers(b);
  f.phi = gaussian_potential<2>(K);
  f.chart.kind = ChartKind::interval;
  f.chart.half_width = gaussian_half_width(K);
  return f;
}

}  // namespace finsler::models

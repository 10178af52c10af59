#pragma once

#include <vector>

#include "finsler/types.hpp"

namespace finsler {

/// Analytic scalar field
///   f(x) = c0 + lin.x + x^T quad x / 2 + sum_m amp_m sin(k_m.x + phase_m),
/// evaluable on any scalar type (double or nested jets).
template <int n>
struct ScalarExpr {
  struct Mode {
    double amp = 0.0;
    Point<n> k = Point<n>::Zero();
    double phase = 0.0;
  };

  double c0 = 0.0;
  Point<n> lin = Point<n>::Zero();
  Mat<double, n> quad = Mat<double, n>::Zero();
  std::vector<Mode> modes;

  static ScalarExpr constant(double c) {
    ScalarExpr e;
    e.c0 = c;
    return e;
  }
  /// Coordinate function x^i.
  static ScalarExpr coordinate(int i) {
    ScalarExpr e;
    e.lin[i] = 1.0;
    return e;
  }
  /// amp * sin(k.x + phase).
  ScalarExpr& add_mode(double amp, const Point<n>& k, double phase = 0.0) {
    modes.push_back({amp, k, phase});
    return *this;
  }

  bool is_constant() const {
    if (!lin.isZero(0.0) || !quad.isZero(0.0)) return false;
    for (const auto& m : modes)
      if (m.amp != 0.0 && !m.k.isZero(0.0)) return false;
    return true;
  }

  template <class S>
  S operator()(const Vec<S, n>& x) const {
    S r(c0);
    for (int i = 0; i < n; ++i)
      if (lin[i] != 0.0) r += x[i] * lin[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (quad(i, j) != 0.0) r += x[i] * x[j] * (0.5 * quad(i, j));
    for (const auto& m : modes) {
      S arg(m.phase);
      for (int i = 0; i < n; ++i)
        if (m.k[i] != 0.0) arg += x[i] * m.k[i];
      r += sin(arg) * m.amp;
    }
    return r;
  }

  ScalarExpr operator-() const {
    ScalarExpr e = *this;
    e.c0 = -e.c0;
    e.lin = -e.lin;
    e.quad = -e.quad;
    for (auto& m : e.modes) m.amp = -m.amp;
    return e;
  }

  bool operator==(const ScalarExpr& o) const {
    if (c0 != o.c0 || lin != o.lin || quad != o.quad) return false;
    if (modes.size() != o.modes.size()) return false;
    for (size_t i = 0; i < modes.size(); ++i)
      if (modes[i].amp != o.modes[i].amp || modes[i].k != o.modes[i].k ||
          modes[i].phase != o.modes[i].phase)
        return false;
    return true;
  }
};

}  // namespace finsler

#pragma once

#include <Eigen/Dense>

#include "finsler/jet.hpp"

namespace finsler {

template <class S, int n>
using Vec = Eigen::Matrix<S, n, 1>;
template <class S, int n>
using Mat = Eigen::Matrix<S, n, n>;

template <int n>
using Point = Vec<double, n>;

/// Point parameter that does not take part in template deduction, so Eigen
/// expressions can be passed directly.
template <int n>
using PointArg = std::type_identity_t<Point<n>>;

/// Third-order array indexed [i][j][k].
template <class S, int n>
using Tensor3 = std::array<std::array<std::array<S, n>, n>, n>;

template <class S, int n>
S dot(const Vec<S, n>& a, const Vec<S, n>& b) {
  S r(0.0);
  for (int i = 0; i < n; ++i) r += a[i] * b[i];
  return r;
}

template <class S, int n>
S quad_form(const Mat<S, n>& m, const Vec<S, n>& a, const Vec<S, n>& b) {
  S r(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r += m(i, j) * a[i] * b[j];
  return r;
}

template <class S, int n>
Vec<S, n> mat_vec(const Mat<S, n>& m, const Vec<S, n>& a) {
  Vec<S, n> r;
  for (int i = 0; i < n; ++i) {
    r[i] = S(0.0);
    for (int j = 0; j < n; ++j) r[i] += m(i, j) * a[j];
  }
  return r;
}

template <class S, int n>
S determinant(const Mat<S, n>& m) {
  static_assert(n >= 1 && n <= 3);
  if constexpr (n == 1) {
    return m(0, 0);
  } else if constexpr (n == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  } else {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
}

/// Cofactor inverse; works for any scalar type with field arithmetic.
template <class S, int n>
Mat<S, n> inverse(const Mat<S, n>& m) {
  static_assert(n >= 1 && n <= 3);
  Mat<S, n> r;
  if constexpr (n == 1) {
    r(0, 0) = S(1.0) / m(0, 0);
  } else if constexpr (n == 2) {
    const S inv = S(1.0) / determinant<S, n>(m);
    r(0, 0) = m(1, 1) * inv;
    r(1, 1) = m(0, 0) * inv;
    r(0, 1) = -(m(0, 1) * inv);
    r(1, 0) = -(m(1, 0) * inv);
  } else {
    const S inv = S(1.0) / determinant<S, n>(m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
        const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
        r(i, j) = (m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1)) * inv;
      }
  }
  return r;
}

template <class S, int n>
Vec<S, n> constant_vec(const Vec<double, n>& a) {
  Vec<S, n> r;
  for (int i = 0; i < n; ++i) r[i] = S(a[i]);
  return r;
}

template <class S, int n>
Vec<double, n> values(const Vec<S, n>& a) {
  Vec<double, n> r;
  for (int i = 0; i < n; ++i) r[i] = value_of(a[i]);
  return r;
}

}  // namespace finsler

#pragma once

// Second-order forward-mode differentiation.
//
// Jet2<T, M> carries a value, M first partials and the packed upper triangle
// of the M x M Hessian. T may itself be a Jet2, which gives mixed derivatives
// up to fourth order.

#include <array>
#include <cmath>
#include <type_traits>
#include <utility>

#include <Eigen/Core>

namespace finsler {

template <class T, int M>
class Jet2;

template <class X>
struct is_jet : std::false_type {};
template <class T, int M>
struct is_jet<Jet2<T, M>> : std::true_type {};

/// Innermost double value of a (possibly nested) jet.
inline double value_of(double x) { return x; }
template <class T, int M>
double value_of(const Jet2<T, M>& x) {
  return value_of(x.v);
}

template <class T, int M>
class Jet2 {
 public:
  static constexpr int kVars = M;
  static constexpr int kPacked = M * (M + 1) / 2;
  using Inner = T;

  T v{};
  std::array<T, M> d{};
  std::array<T, kPacked> h{};

  Jet2() : v(0.0) { zero_derivs(); }
  Jet2(double c) : v(c) { zero_derivs(); }  // NOLINT: implicit on purpose
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Jet2(const T& c) : v(c) {  // NOLINT
    zero_derivs();
  }

  /// Independent variable number i with the given value.
  static Jet2 variable(const T& value, int i) {
    Jet2 r(value);
    r.d[i] = T(1.0);
    return r;
  }

  static constexpr int idx(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * M - i * (i - 1) / 2 + (j - i);
  }

  const T& grad(int i) const { return d[i]; }
  const T& hess(int i, int j) const { return h[idx(i, j)]; }
  T& hess(int i, int j) { return h[idx(i, j)]; }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (int i = 0; i < M; ++i) d[i] += o.d[i];
    for (int k = 0; k < kPacked; ++k) h[k] += o.h[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v -= o.v;
    for (int i = 0; i < M; ++i) d[i] -= o.d[i];
    for (int k = 0; k < kPacked; ++k) h[k] -= o.h[k];
    return *this;
  }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  Jet2 operator-() const {
    Jet2 r;
    r.v = -v;
    for (int i = 0; i < M; ++i) r.d[i] = -d[i];
    for (int k = 0; k < kPacked; ++k) r.h[k] = -h[k];
    return r;
  }

  // Scaling by a value carrying no derivatives in this level.
  Jet2 scaled(const T& s) const {
    Jet2 r;
    r.v = v * s;
    for (int i = 0; i < M; ++i) r.d[i] = d[i] * s;
    for (int k = 0; k < kPacked; ++k) r.h[k] = h[k] * s;
    return r;
  }

  /// f(this) given f, f', f'' at the value.
  Jet2 chain(const T& f0, const T& f1, const T& f2) const {
    Jet2 r;
    r.v = f0;
    for (int i = 0; i < M; ++i) r.d[i] = f1 * d[i];
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j) {
        const int k = idx(i, j);
        r.h[k] = f1 * h[k] + f2 * (d[i] * d[j]);
      }
    return r;
  }

 private:
  void zero_derivs() {
    for (auto& x : d) x = T(0.0);
    for (auto& x : h) x = T(0.0);
  }
};

template <class T, int M>
Jet2<T, M> operator+(Jet2<T, M> a, const Jet2<T, M>& b) {
  return a += b;
}
template <class T, int M>
Jet2<T, M> operator-(Jet2<T, M> a, const Jet2<T, M>& b) {
  return a -= b;
}
template <class T, int M>
Jet2<T, M> operator*(const Jet2<T, M>& a, const Jet2<T, M>& b) {
  Jet2<T, M> r;
  r.v = a.v * b.v;
  for (int i = 0; i < M; ++i) r.d[i] = a.v * b.d[i] + a.d[i] * b.v;
  for (int i = 0; i < M; ++i)
    for (int j = i; j < M; ++j) {
      const int k = Jet2<T, M>::idx(i, j);
      r.h[k] = a.v * b.h[k] + a.h[k] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i];
    }
  return r;
}

template <class T, int M>
Jet2<T, M> reciprocal(const Jet2<T, M>& a) {
  const T inv = T(1.0) / a.v;
  const T inv2 = inv * inv;
  return a.chain(inv, -inv2, T(2.0) * inv2 * inv);
}

template <class T, int M>
Jet2<T, M> operator/(const Jet2<T, M>& a, const Jet2<T, M>& b) {
  return a * reciprocal(b);
}

// Mixed operations with the inner scalar type (and, through conversion, with
// plain doubles). The second parameter is non-deduced so literals convert.
template <class T, int M>
Jet2<T, M> operator+(Jet2<T, M> a, const std::type_identity_t<T>& s) {
  a.v += s;
  return a;
}
template <class T, int M>
Jet2<T, M> operator+(const std::type_identity_t<T>& s, Jet2<T, M> a) {
  a.v += s;
  return a;
}
template <class T, int M>
Jet2<T, M> operator-(Jet2<T, M> a, const std::type_identity_t<T>& s) {
  a.v -= s;
  return a;
}
template <class T, int M>
Jet2<T, M> operator-(const std::type_identity_t<T>& s, const Jet2<T, M>& a) {
  Jet2<T, M> r = -a;
  r.v += s;
  return r;
}
template <class T, int M>
Jet2<T, M> operator*(const Jet2<T, M>& a, const std::type_identity_t<T>& s) {
  return a.scaled(s);
}
template <class T, int M>
Jet2<T, M> operator*(const std::type_identity_t<T>& s, const Jet2<T, M>& a) {
  return a.scaled(s);
}
template <class T, int M>
Jet2<T, M> operator/(const Jet2<T, M>& a, const std::type_identity_t<T>& s) {
  return a.scaled(T(1.0) / s);
}
template <class T, int M>
Jet2<T, M> operator/(const std::type_identity_t<T>& s, const Jet2<T, M>& a) {
  return reciprocal(a).scaled(s);
}

// Comparisons look only at the innermost value.
template <class T, int M>
bool operator<(const Jet2<T, M>& a, const Jet2<T, M>& b) {
  return value_of(a) < value_of(b);
}
template <class T, int M>
bool operator>(const Jet2<T, M>& a, const Jet2<T, M>& b) {
  return value_of(a) > value_of(b);
}
template <class T, int M>
bool operator<(const Jet2<T, M>& a, double b) {
  return value_of(a) < b;
}
template <class T, int M>
bool operator>(const Jet2<T, M>& a, double b) {
  return value_of(a) > b;
}

using std::abs;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T, int M>
Jet2<T, M> sqrt(const Jet2<T, M>& a) {
  const T s = sqrt(a.v);
  const T f1 = T(0.5) / s;
  return a.chain(s, f1, -f1 / (T(2.0) * a.v));
}
template <class T, int M>
Jet2<T, M> exp(const Jet2<T, M>& a) {
  const T e = exp(a.v);
  return a.chain(e, e, e);
}
template <class T, int M>
Jet2<T, M> log(const Jet2<T, M>& a) {
  const T inv = T(1.0) / a.v;
  return a.chain(log(a.v), inv, -(inv * inv));
}
template <class T, int M>
Jet2<T, M> sin(const Jet2<T, M>& a) {
  const T s = sin(a.v);
  return a.chain(s, cos(a.v), -s);
}
template <class T, int M>
Jet2<T, M> cos(const Jet2<T, M>& a) {
  const T c = cos(a.v);
  return a.chain(c, -sin(a.v), -c);
}
template <class T, int M>
Jet2<T, M> pow(const Jet2<T, M>& a, double p) {
  const T f0 = pow(a.v, p);
  const T f1 = T(p) * pow(a.v, p - 1.0);
  const T f2 = T(p * (p - 1.0)) * pow(a.v, p - 2.0);
  return a.chain(f0, f1, f2);
}
template <class T, int M>
Jet2<T, M> abs(const Jet2<T, M>& a) {
  return value_of(a) < 0.0 ? -a : a;
}

/// Squared value, cheaper than pow(x, 2).
template <class S>
S square(const S& x) {
  return x * x;
}

}  // namespace finsler

namespace Eigen {

template <class T, int M>
struct NumTraits<finsler::Jet2<T, M>> : GenericNumTraits<finsler::Jet2<T, M>> {
  using Real = finsler::Jet2<T, M>;
  using NonInteger = Real;
  using Nested = Real;
  using Literal = Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1 + M + M * (M + 1) / 2,
    AddCost = 1 + M + M * (M + 1) / 2,
    MulCost = 4 * (1 + M + M * (M + 1) / 2),
  };
  static Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static Real dummy_precision() { return Real(1e-12); }
  static Real highest() { return Real(std::numeric_limits<double>::max()); }
  static Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static int digits10() { return std::numeric_limits<double>::digits10; }
};

}  // namespace Eigen

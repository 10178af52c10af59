#include "finsler/isoperimetry.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "finsler/csv.hpp"

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

bool quadratic_potential(const ScalarExpr<1>& phi) {
  for (const auto& m : phi.modes)
    if (m.amp != 0.0 && m.k[0] != 0.0) return false;
  return phi.quad(0, 0) < 0.0;
}

}  // namespace

std::string to_string(Sweep s) { return s == Sweep::forward ? "forward" : "backward"; }

// ---------------------------------------------------------------------------
// LineMeasure

LineMeasure::LineMeasure(const NormField<1>& N) : phi_(N.phi) {
  switch (N.chart.kind) {
    case ChartKind::interval:
      lo_ = -N.chart.half_width;
      hi_ = N.chart.half_width;
      break;
    case ChartKind::plane:
      lo_ = -kInf;
      hi_ = kInf;
      break;
    case ChartKind::torus:
      throw ConfigError("half-lines need an interval or plane chart");
  }
  gaussian_ = quadratic_potential(phi_);
  if (gaussian_) {
    // phi = c0 + l x + q x^2/2 + (constant modes), q < 0.
    const double q = -phi_.quad(0, 0);
    mu_ = phi_.lin[0] / q;
    sigma_ = 1.0 / std::sqrt(q);
    tlo_ = gauss_cdf((lo_ - mu_) / sigma_);
    thi_ = upper_tail((hi_ - mu_) / sigma_);  // mass above hi
    Z_ = 1.0 - tlo_ - thi_;
  } else {
    Z_ = integral(lo_, hi_);
  }
  if (!(std::isfinite(Z_) && Z_ > 0.0)) throw NotNormalized("measure on the line is not finite");
}

double LineMeasure::raw(double x) const { return std::exp(phi_(Point<1>(x))); }

double LineMeasure::integral(double a, double b) const {
  if (!(a < b)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate([this](double x) { return raw(x); }, a, b, 15, 1e-14);
}

double LineMeasure::density(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  if (gaussian_) return gauss_density((x - mu_) / sigma_) / (sigma_ * Z_);
  return raw(x) / Z_;
}

double LineMeasure::mass_below(double c) const {
  if (c <= lo_) return 0.0;
  if (c >= hi_) return 1.0;
  if (gaussian_) {
    const double z = (c - mu_) / sigma_;
    return z < 0 ? (gauss_cdf(z) - tlo_) / Z_ : 1.0 - mass_above(c);
  }
  return integral(lo_, c) / Z_;
}

double LineMeasure::mass_above(double c) const {
  if (c <= lo_) return 1.0;
  if (c >= hi_) return 0.0;
  if (gaussian_) {
    const double z = (c - mu_) / sigma_;
    return z >= 0 ? (upper_tail(z) - thi_) / Z_ : 1.0 - mass_below(c);
  }
  return integral(c, hi_) / Z_;
}

double LineMeasure::threshold(double theta, Sweep s) const {
  if (!(theta > 0.0 && theta < 1.0)) throw OutOfRange("threshold needs theta in (0, 1)");
  if (gaussian_) {
    // Closed form through phi^{-1} of the untruncated standard normal.
    if (s == Sweep::forward) return mu_ + sigma_ * gauss_cdf_inverse(tlo_ + theta * Z_);
    return mu_ - sigma_ * gauss_cdf_inverse(thi_ + theta * Z_);
  }
  auto f = [&](double c) { return s == Sweep::forward ? mass_below(c) - theta : theta - mass_above(c); };
  double a = std::isfinite(lo_) ? lo_ : -1.0, b = std::isfinite(hi_) ? hi_ : 1.0;
  while (f(a) > 0) a *= 2;
  while (f(b) < 0) b *= 2;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    (f(m) < 0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// 1D half-lines

namespace {

ProfilePoint halfline_point(const NormField<1>& N, const LineMeasure& m, Sweep s, double c) {
  ProfilePoint p;
  p.c = c;
  p.sweep = to_string(s);
  p.theta = s == Sweep::forward ? m.mass_below(c) : m.mass_above(c);
  // The forward neighbourhood of (-inf, c] grows to the right at speed 1/F(c, 1).
  const double v = s == Sweep::forward ? 1.0 : -1.0;
  p.boundary = m.density(c) / N.F(Point<1>(c), Point<1>(v));
  return p;
}

ProfilePoint halfline_point_at(const NormField<1>& N, const LineMeasure& m, Sweep s, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw OutOfRange("theta must lie in [0, 1]");
  if (theta == 0.0 || theta == 1.0) {
    ProfilePoint p;
    p.theta = theta;
    p.sweep = to_string(s);
    const bool empty_left = (theta == 0.0) == (s == Sweep::forward);
    p.c = empty_left ? m.lo() : m.hi();
    return p;
  }
  return halfline_point(N, m, s, m.threshold(theta, s));
}

}  // namespace

ProfilePoint halfline_profile_1d(const NormField<1>& N, Sweep s, double c) {
  return halfline_point(N, LineMeasure(N), s, c);
}

ProfilePoint halfline_profile_at(const NormField<1>& N, Sweep s, double theta) {
  return halfline_point_at(N, LineMeasure(N), s, theta);
}

std::vector<ProfilePoint> halfline_profile(const NormField<1>& N, const std::vector<double>& thetas) {
  const LineMeasure m(N);
  std::vector<ProfilePoint> out;
  for (double th : thetas) {
    const auto f = halfline_point_at(N, m, Sweep::forward, th);
    const auto b = halfline_point_at(N, m, Sweep::backward, th);
    out.push_back(b.boundary < f.boundary ? b : f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid Minkowski content

template <int n>
Grid<n> isoperimetry_grid(const NormField<n>& N, const std::array<int, n>& nodes) {
  if (N.chart.kind != ChartKind::plane) return make_grid<n>(N, nodes, true);
  NormField<n> box = N;
  box.chart.kind = ChartKind::interval;
  return make_grid<n>(box, nodes, true);
}

namespace {

template <int n>
bool shift(const Grid<n>& G, std::array<int, n> m, const std::array<int, n>& o, int* out) {
  for (int a = 0; a < n; ++a) {
    m[a] += o[a];
    if (G.topology == Topology::zero_flux && (m[a] < 0 || m[a] >= G.nodes[a])) return false;
  }
  *out = G.index(m);
  return true;
}

template <int n>
Point<n> physical(const Grid<n>& G, const std::array<int, n>& o) {
  Point<n> v;
  for (int a = 0; a < n; ++a) v[a] = o[a] * G.h[a];
  return v;
}

template <int n>
std::vector<std::array<int, n>> box_offsets(const std::array<int, n>& R) {
  std::vector<std::array<int, n>> out;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 2 * R[a] + 1;
  for (int k = 0; k < total; ++k) {
    std::array<int, n> o{};
    int r = k;
    for (int a = 0; a < n; ++a) {
      o[a] = r % (2 * R[a] + 1) - R[a];
      r /= 2 * R[a] + 1;
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace

namespace {

// A point of the reconstructed boundary, as an offset v from node x.
template <int n>
struct Sample {
  int x;
  Point<n> v;
};

// Boundary of A as a polyline sampled every 1/kSub of a segment: the crossing
// points on edges in 1D, marching-squares segments between them in 2D.
constexpr int kSub = 8;

template <int n>
std::vector<Sample<n>> boundary_samples(const Grid<n>& G, const GridSet& A) {
  const bool has_level = A.level.size() > 0;
  auto lv = [&](int k) { return has_level ? A.level[k] : (A.inside[k] ? -0.5 : 0.5); };
  auto t_of = [&](int a, int b) {
    const double la = lv(a), lb = lv(b);
    return la == lb ? 0.5 : std::clamp(la / (la - lb), 0.0, 1.0);
  };
  std::vector<Sample<n>> out;
  if constexpr (n == 1) {
    for (int x = 0; x < G.size(); ++x) {
      const auto m = G.multi_index(x);
      for (int sign : {-1, 1}) {
        int y;
        if (!shift<n>(G, m, {sign}, &y) || A.inside[x] == A.inside[y]) continue;
        if (!A.inside[x]) continue;
        out.push_back({x, Point<1>(sign * t_of(x, y) * G.h[0])});
      }
    }
  } else {
    const std::array<std::array<int, 2>, 4> corner{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    for (int x = 0; x < G.size(); ++x) {
      const auto m = G.multi_index(x);
      std::array<int, 4> k;
      bool ok = true;
      for (int c = 0; c < 4 && ok; ++c) ok = shift<2>(G, m, corner[c], &k[c]);
      if (!ok) continue;
      int count = 0;
      for (int c = 0; c < 4; ++c) count += A.inside[k[c]];
      if (count == 0 || count == 4) continue;
      // Crossing on edge c -> c+1, or none.
      std::array<Point<2>, 4> cross;
      std::array<bool, 4> has{};
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if (A.inside[k[a]] == A.inside[k[b]]) continue;
        const Point<2> pa(corner[a][0] * G.h[0], corner[a][1] * G.h[1]);
        const Point<2> pb(corner[b][0] * G.h[0], corner[b][1] * G.h[1]);
        cross[e] = pa + t_of(k[a], k[b]) * (pb - pa);
        has[e] = true;
      }
      std::vector<std::pair<int, int>> segs;
      if (count == 2 && A.inside[k[0]] == A.inside[k[2]]) {
        // Saddle: the centre value decides which corners are cut off.
        const double centre = 0.25 * (lv(k[0]) + lv(k[1]) + lv(k[2]) + lv(k[3]));
        if ((centre <= 0.0) == static_cast<bool>(A.inside[k[0]]))
          segs = {{0, 1}, {2, 3}};
        else
          segs = {{3, 0}, {1, 2}};
      } else {
        std::vector<int> e;
        for (int i = 0; i < 4; ++i)
          if (has[i]) e.push_back(i);
        segs = {{e[0], e[1]}};
      }
      for (const auto& [e0, e1] : segs)
        for (int j = 0; j <= kSub; ++j) {
          const double t = static_cast<double>(j) / kSub;
          out.push_back({x, Point<2>((1 - t) * cross[e0] + t * cross[e1])});
        }
    }
  }
  return out;
}

}  // namespace

template <int n>
GridFunction forward_distance(const NormField<n>& N, const Grid<n>& G, const GridSet& A, double r_max) {
  const int size = G.size();
  const NodeSet& in = A.inside;
  if (static_cast<int>(in.size()) != size) throw ConfigError("node set size does not match the grid");
  if (A.level.size() > 0 && A.level.size() != size) throw ConfigError("level size does not match the grid");
  const long inside = std::count(in.begin(), in.end(), 1);
  if (inside == 0) throw EmptySet();
  if (inside == size) throw FullSet();

  GridFunction d = GridFunction::Constant(size, kInf);
  for (int x = 0; x < size; ++x)
    if (in[x]) d[x] = 0.0;
  const auto samples = boundary_samples<n>(G, A);

  double fmin = kInf;
  for (const auto& v : detail::sphere_directions<n>(64)) fmin = std::min(fmin, N.F(G.lo, v));
  fmin *= 0.9;
  auto window = [&](double radius) {
    std::array<int, n> R{};
    for (int a = 0; a < n; ++a) R[a] = static_cast<int>(std::ceil(radius / (fmin * G.h[a]))) + 2;
    return box_offsets<n>(R);
  };

  if (N.is_minkowski()) {
    const auto offsets = window(r_max);
    for (const auto& p : samples) {
      const auto m = G.multi_index(p.x);
      for (const auto& o : offsets) {
        int y;
        if (!shift<n>(G, m, o, &y) || in[y]) continue;
        const Point<n> v = physical<n>(G, o) - p.v;
        // F(v) >= fmin |v| rules out most pairs without evaluating F.
        if (fmin * v.norm() >= std::min(d[y], r_max)) continue;
        const double f = N.F(G.lo, v);
        if (f < d[y]) d[y] = f;
      }
    }
  } else {
    double hmax = *std::max_element(G.h.begin(), G.h.end());
    const auto offsets = window(2.0 * hmax);
    for (const auto& p : samples) {
      const auto m = G.multi_index(p.x);
      const Point<n> q = G.point(p.x) + p.v;
      for (const auto& o : offsets) {
        int y;
        if (!shift<n>(G, m, o, &y) || in[y]) continue;
        const Point<n> v = physical<n>(G, o) - p.v;
        const double f = N.F(Point<n>(q + 0.5 * v), v);
        if (f < d[y]) d[y] = f;
      }
    }
    std::vector<std::array<int, n>> stencil;
    if constexpr (n == 1) {
      stencil = {{1}, {-1}};
    } else {
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j)
          if ((i || j) && std::gcd(std::abs(i), std::abs(j)) == 1) stencil.push_back({i, j});
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (int y = 0; y < size; ++y)
      if (!in[y] && std::isfinite(d[y])) queue.push({d[y], y});
    while (!queue.empty()) {
      const auto [dx, x] = queue.top();
      queue.pop();
      if (dx > d[x] || dx > r_max) continue;
      const auto m = G.multi_index(x);
      const Point<n> px = G.point(x);
      for (const auto& o : stencil) {
        int y;
        if (!shift<n>(G, m, o, &y) || in[y]) continue;
        const Point<n> step = physical<n>(G, o);
        const double dy = dx + N.F(Point<n>(px + 0.5 * step), step);
        if (dy < d[y]) {
          d[y] = dy;
          queue.push({dy, y});
        }
      }
    }
  }
  for (int k = 0; k < size; ++k)
    if (d[k] >= r_max) d[k] = kInf;
  return d;
}

template <int n>
std::vector<double> default_eps(const NormField<n>& N, const Grid<n>& G) {
  double step = 0.0;
  for (int a = 0; a < n; ++a)
    for (int sign : {-1, 1}) {
      Point<n> v = Point<n>::Zero();
      v[a] = sign * G.h[a];
      step = std::max(step, N.F(G.lo, v));
    }
  std::vector<double> eps;
  for (int k = 0; k <= 10; ++k) eps.push_back((6.0 + k) * step);
  return eps;
}

namespace {

// (s(1-s))^4 on [0, 1]; its integral is 1/630.
double bump(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double q = s * (1.0 - s);
  return q * q * q * q;
}
constexpr double kBumpMass = 1.0 / 630.0;

}  // namespace

template <int n>
double minkowski_content(const NormField<n>& N, const Grid<n>& G, const GridSet& A,
                         std::vector<double> eps) {
  if (eps.empty()) eps = default_eps(N, G);
  if (eps.size() < 5) throw ConfigError("minkowski_content needs at least 5 radii");
  const double r_max = *std::max_element(eps.begin(), eps.end()) * (1 + 1e-12);
  const GridFunction d = forward_distance(N, G, A, r_max);
  const int m = static_cast<int>(eps.size());
  Eigen::MatrixXd V(m, 4);
  Eigen::VectorXd S(m);
  for (int k = 0; k < m; ++k) {
    double sum = 0.0;
    for (int y = 0; y < G.size(); ++y)
      if (!A.inside[y] && d[y] < eps[k]) sum += G.w[y] * bump(d[y] / eps[k]);
    S[k] = sum / (kBumpMass * eps[k]);
    V.row(k) << 1.0, eps[k], eps[k] * eps[k], eps[k] * eps[k] * eps[k];
  }
  const Eigen::Vector4d coef = V.colPivHouseholderQr().solve(S);
  return coef[0];
}

// ---------------------------------------------------------------------------
// Half-planes

GridSet halfplane_set(const Grid<2>& G, double angle, double theta, double* c_out) {
  if (!(theta > 0.0 && theta < 1.0)) throw OutOfRange("half-plane mass must lie in (0, 1)");
  const Point<2> nu(std::cos(angle), std::sin(angle));
  const int size = G.size();
  std::vector<double> s(size);
  for (int k = 0; k < size; ++k) s[k] = nu.dot(G.point(k));
  std::vector<int> order(size);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s[a] < s[b]; });
  const double tie = 1e-9 * std::min(G.h[0], G.h[1]);

  // Cut only between tie groups; pick the cut whose mass is closest to theta.
  double mass = 0.0, best_gap = kInf;
  int best = 0;
  for (int i = 0; i < size;) {
    int j = i;
    while (j < size && s[order[j]] - s[order[i]] <= tie) mass += G.w[order[j++]];
    if (j < size && std::abs(mass - theta) < best_gap) {
      best_gap = std::abs(mass - theta);
      best = j;
    }
    if (mass > theta) break;
    i = j;
  }
  if (best == 0) best = 1;
  GridSet A{NodeSet(size, 0), GridFunction(size)};
  for (int i = 0; i < best; ++i) A.inside[order[i]] = 1;
  const double c = 0.5 * (s[order[best - 1]] + s[order[std::min(best, size - 1)]]);
  for (int k = 0; k < size; ++k) A.level[k] = s[k] - c;
  if (c_out) *c_out = c;
  return A;
}

std::vector<ProfilePoint> halfplane_profile(const NormField<2>& N, const Grid<2>& G,
                                            const std::vector<double>& thetas, int directions,
                                            const std::vector<double>& eps) {
  if (!G.normalized()) throw NotNormalized();
  std::vector<ProfilePoint> out;
  for (double th : thetas) {
    ProfilePoint best;
    best.boundary = kInf;
    for (int j = 0; j < directions; ++j) {
      const double angle = 2.0 * std::numbers::pi * j / directions;
      double c = 0.0;
      const GridSet A = halfplane_set(G, angle, th, &c);
      ProfilePoint p;
      for (int k = 0; k < G.size(); ++k)
        if (A.inside[k]) p.theta += G.w[k];
      p.boundary = minkowski_content(N, G, A, eps);
      p.c = c;
      p.sweep = "angle=" + csv_num(angle);
      if (p.boundary < best.boundary) best = p;
    }
    out.push_back(best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature inputs and checks

template <int n>
double convexity_modulus(const NormField<n>& N, int samples, unsigned long long seed) {
  if (!N.is_minkowski()) throw ConfigError("the convexity modulus needs F independent of x");
  if (N.chart.kind == ChartKind::torus) throw ConfigError("the convexity modulus needs a flat chart");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> X(-N.chart.half_width, N.chart.half_width);
  std::uniform_real_distribution<double> L(0.05, 0.95);
  auto Phi = [&](const Point<n>& x) { return -N.phi(x); };
  double best = kInf;
  for (int s = 0; s < samples; ++s) {
    Point<n> x, y;
    for (int i = 0; i < n; ++i) x[i] = X(rng), y[i] = X(rng);
    const double l = L(rng);
    const double d = N.F(x, Point<n>(y - x));
    if (d < 1e-3) continue;
    const Point<n> z = (1 - l) * x + l * y;
    const double gap = (1 - l) * Phi(x) + l * Phi(y) - Phi(z);
    best = std::min(best, 2.0 * gap / ((1 - l) * l * d * d));
  }
  return best - 0.01 * std::abs(best);
}

template <int n>
double certified_isoperimetric_K(const NormField<n>& N) {
  double K = certify_curvature(N, kInfiniteN, 32, 64).K;
  if (N.is_minkowski() && N.chart.kind != ChartKind::torus) K = std::max(K, convexity_modulus(N));
  return K;
}

template <int n>
CheckReport check_bakry_ledoux(const NormField<n>& N, const std::vector<ProfilePoint>& profile,
                               double total_mass, double K, double tol) {
  if (std::abs(total_mass - 1.0) > 1e-12) throw NotNormalized();
  if (!(K > 0.0)) throw CurvatureNotCertified("the Gaussian bound needs K > 0");
  const double Kc = certified_isoperimetric_K(N);
  if (K > Kc)
    throw CurvatureNotCertified("declared K=" + csv_num(K) + " exceeds certified " + csv_num(Kc));
  CheckReport r("bakry_ledoux", CheckKind::inequality, tol);
  for (const auto& p : profile) {
    if (!(p.theta > 0.0 && p.theta < 1.0)) continue;
    r.add(p.boundary - gaussian_profile(K, p.theta),
          [&] { return "theta=" + csv_num(p.theta) + " c=" + csv_num(p.c) + " " + p.sweep; });
  }
  r.note = "K=" + csv_num(K) + " certified=" + csv_num(Kc);
  return r;
}

CheckReport check_needle_bound(const std::vector<ProfilePoint>& profile, double K, double Lambda_F) {
  CheckReport r("needle_bound", CheckKind::inequality, 0.0);
  double improvement = kInf;
  for (const auto& p : profile) {
    if (!(p.theta > 0.0 && p.theta < 1.0)) continue;
    const double I = gaussian_profile(K, p.theta);
    r.add(p.boundary - I / Lambda_F, [&] { return "theta=" + csv_num(p.theta); });
    improvement = std::min(improvement, I - I / Lambda_F);
  }
  r.note = "Lambda_F=" + csv_num(Lambda_F) + " improvement=" + csv_num(improvement);
  return r;
}

std::string profile_csv(const std::vector<ProfilePoint>& profile, double K, double Lambda_F) {
  std::string out;
  CsvWriter w(out);
  w.header({"theta", "m_plus", "I_K", "needle_bound", "c", "sweep"});
  for (const auto& p : profile) {
    const double I = gaussian_profile(K, p.theta);
    w.cell(p.theta).cell(p.boundary).cell(I).cell(I / Lambda_F).cell(p.c).cell(p.sweep).end();
  }
  return out;
}

#define FINSLER_INSTANTIATE_ISO(n)                                                               \
  template Grid<n> isoperimetry_grid<n>(const NormField<n>&, const std::array<int, n>&);         \
  template GridFunction forward_distance<n>(const NormField<n>&, const Grid<n>&, const GridSet&, \
                                            double);                                             \
  template std::vector<double> default_eps<n>(const NormField<n>&, const Grid<n>&);              \
  template double minkowski_content<n>(const NormField<n>&, const Grid<n>&, const GridSet&,      \
                                       std::vector<double>);                                     \
  template double convexity_modulus<n>(const NormField<n>&, int, unsigned long long);            \
  template double certified_isoperimetric_K<n>(const NormField<n>&);                             \
  template CheckReport check_bakry_ledoux<n>(const NormField<n>&, const std::vector<ProfilePoint>&, \
                                             double, double, double);

FINSLER_INSTANTIATE_ISO(1)
FINSLER_INSTANTIATE_ISO(2)

}  // namespace finsler

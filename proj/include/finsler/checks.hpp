#pragma once

// Residual checks of the curvature inequalities: pointwise ones on analytic
// fields and semigroup ones along simulated flows.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "finsler/calculus.hpp"
#include "finsler/gaussian.hpp"
#include "finsler/heat.hpp"

namespace finsler {

enum class CheckKind { inequality, identity };

/// Worst signed residual over the samples. Inequalities pass when the worst
/// (smallest) residual is >= -tolerance, identities when max |residual| <= tolerance.
struct CheckReport {
  std::string name;
  CheckKind kind = CheckKind::inequality;
  long samples = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string witness;
  std::string note;

  CheckReport() = default;
  CheckReport(std::string n, CheckKind k, double tol)
      : name(std::move(n)), kind(k), tolerance(tol) {
    worst = k == CheckKind::inequality ? std::numeric_limits<double>::infinity() : 0.0;
  }

  /// Record a residual; `describe` is only called when it becomes the worst.
  template <class Describe>
  void add(double r, Describe&& describe) {
    const bool first = samples == 0;
    ++samples;
    const double inf = std::numeric_limits<double>::infinity();
    // NaN residuals count as the worst possible case.
    if (kind == CheckKind::inequality) {
      if (std::isnan(r)) r = -inf;
      if (first || r < worst) worst = r, witness = describe();
    } else {
      r = std::isnan(r) ? inf : std::abs(r);
      if (first || r > worst) worst = r, witness = describe();
    }
    update();
  }
  void add(double r) {
    add(r, [] { return std::string(); });
  }
  void update() {
    if (samples == 0) {
      pass = false;
      return;
    }
    pass = kind == CheckKind::inequality ? worst >= -tolerance : worst <= tolerance;
  }
};

std::string reports_csv(const std::vector<CheckReport>& reports);
std::string reports_summary(const std::vector<CheckReport>& reports);
bool all_pass(const std::vector<CheckReport>& reports);

std::string describe_point(const double* x, int n);
template <int n>
std::string describe(const Point<n>& x) {
  return describe_point(x.data(), n);
}

// ---------------------------------------------------------------------------
// Curvature certification

struct CurvatureBound {
  double sampled_min = 0.0;  // min Ric_N(v)/F(v)^2 over the samples
  double K = 0.0;            // certified bound: sampled_min - 1% |sampled_min|
  long samples = 0;
  std::string witness;
};

/// Sampled lower bound of Ric_N/F^2 over chart points x sphere directions,
/// plus the (x, v) pairs in `extra` (typically gradient directions).
template <int n>
CurvatureBound certify_curvature(const NormField<n>& N, double Nparam, int chart_points,
                                 int directions,
                                 const std::vector<std::pair<Point<n>, Point<n>>>& extra = {}) {
  CurvatureBound b;
  b.sampled_min = std::numeric_limits<double>::infinity();
  auto visit = [&](const Point<n>& x, const Point<n>& v) {
    if (is_zero_vector(v)) return;
    const double F = N.F(x, v);
    const double r = weighted_ricci(N, x, v, Nparam) / (F * F);
    ++b.samples;
    if (r < b.sampled_min) {
      b.sampled_min = r;
      b.witness = "x=" + describe<n>(x) + " v=" + describe<n>(v);
    }
  };
  const auto xs = N.chart.sample_points(chart_points);
  const auto dirs = detail::sphere_directions<n>(directions);
  for (const auto& x : xs)
    for (const auto& v : dirs) visit(x, v);
  for (const auto& [x, v] : extra) visit(x, v);
  b.K = b.sampled_min - 0.01 * std::abs(b.sampled_min);
  return b;
}

// ---------------------------------------------------------------------------
// Pointwise suite

/// Bochner inequality LHS >= K F^2(grad u) + (Delta u)^2 / Nparam at the
/// non-critical sample points. Ric_Nparam >= K is verified first at every point.
template <int n>
CheckReport check_bochner(const NormField<n>& N, const ScalarField<n>& u, double K, double Nparam,
                          const std::vector<Point<n>>& points, double tol = 1e-5) {
  CheckReport r("bochner", CheckKind::inequality, tol);
  for (const auto& x : points) {
    BochnerTerms<n> b;
    try {
      b = bochner_terms(N, u, x);
    } catch (const CriticalPoint&) {
      continue;
    }
    const double F2 = b.F * b.F;
    const double ricN = std::isinf(Nparam) ? b.ric_inf : weighted_ricci(N, x, b.V, Nparam);
    if (ricN < K * F2 - 1e-9 * (1.0 + F2))
      throw CurvatureNotCertified("Ric_N < K at " + describe<n>(x));
    double res = b.lhs - K * F2;
    if (std::isfinite(Nparam)) res -= b.laplacian * b.laplacian / Nparam;
    r.add(res, [&] { return describe<n>(x); });
  }
  return r;
}

/// Relative residual of the N = infinity Bochner-Weitzenboeck identity.
template <int n>
CheckReport check_bochner_identity(const NormField<n>& N, const ScalarField<n>& u,
                                   const std::vector<Point<n>>& points, double tol = 1e-4) {
  CheckReport r("bochner_identity", CheckKind::identity, tol);
  for (const auto& x : points) {
    BochnerTerms<n> b;
    try {
      b = bochner_terms(N, u, x);
    } catch (const CriticalPoint&) {
      continue;
    }
    const double scale =
        1.0 + std::abs(b.lin_lap) + std::abs(b.d_lap) + std::abs(b.ric_inf) + std::abs(b.hs);
    r.add((b.lhs - b.ric_inf - b.hs) / scale, [&] { return describe<n>(x); });
  }
  return r;
}

/// Improved Bochner: LHS - K F^2 - D[F(grad u)](grad^{grad u} F(grad u)) >= 0.
template <int n>
CheckReport check_improved_bochner(const NormField<n>& N, const ScalarField<n>& u, double K,
                                   const std::vector<Point<n>>& points, double tol = 1e-5) {
  CheckReport r("improved_bochner", CheckKind::inequality, tol);
  for (const auto& x : points) {
    BochnerTerms<n> b;
    try {
      b = bochner_terms(N, u, x);
    } catch (const CriticalPoint&) {
      continue;
    }
    const double F2 = b.F * b.F;
    if (b.ric_inf < K * F2 - 1e-9 * (1.0 + F2))
      throw CurvatureNotCertified("Ric_inf < K at " + describe<n>(x));
    r.add(b.lhs - K * F2 - b.grad_F_sq, [&] { return describe<n>(x); });
  }
  return r;
}

/// The intermediate bound 4 F^2 |Hess u|^2_HS >= D[F^2](grad^{grad u} F^2).
template <int n>
CheckReport check_improved_bochner_aux(const NormField<n>& N, const ScalarField<n>& u,
                                       const std::vector<Point<n>>& points, double tol = 1e-8) {
  CheckReport r("improved_bochner_aux", CheckKind::inequality, tol);
  for (const auto& x : points) {
    BochnerTerms<n> b;
    try {
      b = bochner_terms(N, u, x);
    } catch (const CriticalPoint&) {
      continue;
    }
    r.add(b.aux_lhs - b.aux_rhs, [&] { return describe<n>(x); });
  }
  return r;
}

// ---------------------------------------------------------------------------
// Semigroup suite

/// Slack constant C in the nodewise tolerance C (h + dt) of the semigroup
/// checks, frozen from `calibrate_slack()`.
inline constexpr double kSlackC = 0.02;

struct SlackCalibration {
  double C = 0.0;        // max discretization error / (h + dt)
  double h = 0.0, dt = 0.0;
  double worst_error = 0.0;
};

/// Discretization error of both sides of the L2 and L1 gradient estimates on
/// the Euclidean circle with u0 = cos x, against the Fourier-series solution.
SlackCalibration calibrate_slack(int nodes = 256, double dt = 1e-3);

template <int n>
double grid_scale(const Grid<n>& G) {
  return *std::max_element(G.h.begin(), G.h.end());
}

template <int n>
double semigroup_slack(const FlowTrace<n>& tr, double C = kSlackC) {
  return C * (grid_scale(tr.grid) + tr.dt);
}

namespace detail {

// Nodewise check of lhs <= rhs on the interior nodes.
template <int n>
void add_nodewise(CheckReport& r, const Grid<n>& G, const GridFunction& lhs, const GridFunction& rhs,
                  bool exclude_boundary) {
  for (int k = 0; k < G.size(); ++k) {
    if (exclude_boundary && G.is_boundary(k)) continue;
    r.add(rhs[k] - lhs[k], [&] { return "node " + std::to_string(k) + " x=" + describe<n>(G.point(k)); });
  }
}

}  // namespace detail

enum class GradientNorm { l2, l1 };

/// Nodal sides (lhs, rhs) of the L2 estimate F^2(grad u_t) <= e^{-2K(t-s)} P_{s,t} F^2(grad u_s),
/// or of the L1 estimate with F in place of F^2 and e^{-K(t-s)}.
template <int n>
std::pair<GridFunction, GridFunction> gradient_estimate_sides(const NormField<n>& N, const FlowTrace<n>& tr,
                                                              double s, double t, double K, GradientNorm p) {
  const auto& G = tr.grid;
  GridFunction Fs = nodal_dual_norm_sq(N, G, tr.states[tr.step_index(s)]);
  GridFunction Ft = nodal_dual_norm_sq(N, G, tr.states[tr.step_index(t)]);
  double rate = 2.0 * K;
  if (p == GradientNorm::l1) {
    Fs = Fs.cwiseSqrt(), Ft = Ft.cwiseSqrt();
    rate = K;
  }
  GridFunction rhs = std::exp(-rate * (t - s)) * linearized_semigroup(tr, Fs, s, t);
  return {std::move(Ft), std::move(rhs)};
}

/// Columns estimate,s,t,node,x1[,x2],lhs,rhs,residual (residual = rhs - lhs), one row per
/// interior node and window.
template <int n>
std::string gradient_residuals_csv(const NormField<n>& N, const FlowTrace<n>& tr,
                                   const std::vector<std::pair<double, double>>& windows, double K,
                                   GradientNorm p);

/// F^2(grad u_t) <= e^{-2K(t-s)} P_{s,t}(F^2(grad u_s)) at interior nodes.
template <int n>
CheckReport check_l2_gradient(const NormField<n>& N, const FlowTrace<n>& tr, double s, double t,
                              double K, double C = kSlackC) {
  CheckReport r("l2_gradient", CheckKind::inequality, semigroup_slack(tr, C));
  const auto [lhs, rhs] = gradient_estimate_sides(N, tr, s, t, K, GradientNorm::l2);
  detail::add_nodewise(r, tr.grid, lhs, rhs, true);
  return r;
}

/// F(grad u_t) <= e^{-K(t-s)} P_{s,t}(F(grad u_s)) at interior nodes.
template <int n>
CheckReport check_l1_gradient(const NormField<n>& N, const FlowTrace<n>& tr, double s, double t,
                              double K, double C = kSlackC) {
  CheckReport r("l1_gradient", CheckKind::inequality, semigroup_slack(tr, C));
  const auto [lhs, rhs] = gradient_estimate_sides(N, tr, s, t, K, GradientNorm::l1);
  detail::add_nodewise(r, tr.grid, lhs, rhs, true);
  return r;
}

/// d/dt [F^2(grad u)/2] = D[Delta u](grad u) along the trace, for trace
/// times in [t_from, t_to]. The left side is a central difference in time.
/// The right side differentiates (Delta u_k + Delta u_{k+1})/2, the time
/// derivative of u that the implicit step pair realizes at t_k. Residuals are
/// relative to the sup norm of the right side at each step. Nodes whose
/// 5-point stencil comes within 5% of sup F(grad u) of the critical set are
/// skipped: the identity holds on M_u only, and Delta u jumps across
/// critical points of non-reversible 1D norms.
template <int n>
CheckReport check_energy_density_derivative(const NormField<n>& N, const FlowTrace<n>& tr,
                                            double t_from = 0.0, double t_to = kInfiniteN,
                                            double tol = 1e-3) {
  CheckReport r("l1_time_derivative", CheckKind::identity, tol);
  const auto& G = tr.grid;
  const int steps = static_cast<int>(tr.states.size()) - 1;
  for (int k = 1; k < steps; ++k) {
    if (tr.times[k] < t_from - 1e-12 || tr.times[k] > t_to + 1e-12) continue;
    const GridFunction fp = 0.5 * nodal_dual_norm_sq(N, G, tr.states[k + 1]);
    const GridFunction fm = 0.5 * nodal_dual_norm_sq(N, G, tr.states[k - 1]);
    const GridFunction F = (2.0 * fp + 2.0 * fm).cwiseSqrt() * 0.5;
    const GridFunction lap = 0.5 * (discrete_laplacian(N, G, tr.states[k]) +
                                    discrete_laplacian(N, G, tr.states[k + 1]));
    const auto Dlap = nodal_differentials(G, lap);
    const auto Du = nodal_differentials(G, tr.states[k]);
    GridFunction rhs(G.size());
    for (int i = 0; i < G.size(); ++i) rhs[i] = Dlap[i].dot(legendre(N, G.point(i), Du[i]));
    const double Fmax = F.maxCoeff();
    auto away_from_critical = [&](int i) {
      const auto m = G.multi_index(i);
      for (int a = 0; a < n; ++a)
        for (int d = -2; d <= 2; ++d) {
          auto mm = m;
          mm[a] += d;
          if (G.topology == Topology::zero_flux && (mm[a] < 0 || mm[a] >= G.nodes[a])) continue;
          if (F[G.index(mm)] < 0.05 * Fmax) return false;
        }
      return true;
    };
    std::vector<int> nodes;
    double scale = 0.0;
    for (int i = 0; i < G.size(); ++i) {
      if (G.is_boundary(i) || !away_from_critical(i)) continue;
      nodes.push_back(i);
      scale = std::max(scale, std::abs(rhs[i]));
    }
    if (scale == 0.0) continue;
    for (int i : nodes) {
      const double lhs = (fp[i] - fm[i]) / (2.0 * tr.dt);
      r.add((lhs - rhs[i]) / scale, [&] {
        return "t=" + std::to_string(tr.times[k]) + " x=" + describe<n>(G.point(i));
      });
    }
  }
  return r;
}

/// Jensen: P(f)^2 <= P(f^2) nodewise.
template <int n>
CheckReport check_jensen(const FlowTrace<n>& tr, const GridFunction& f, double s, double t,
                         double tol = 1e-10) {
  CheckReport r("jensen", CheckKind::inequality, tol);
  const GridFunction Pf = linearized_semigroup(tr, f, s, t);
  const GridFunction Pf2 = linearized_semigroup(tr, GridFunction(f.cwiseProduct(f)), s, t);
  detail::add_nodewise(r, tr.grid, GridFunction(Pf.cwiseProduct(Pf)), Pf2, false);
  return r;
}

/// |<phi, P f>_w - <P^ phi, f>_w| for the pairs given.
template <int n>
CheckReport check_adjoint_pairing(const FlowTrace<n>& tr, const std::vector<GridFunction>& fs,
                                  const std::vector<GridFunction>& phis, double s, double t,
                                  double tol = 1e-11) {
  CheckReport r("adjoint_pairing", CheckKind::identity, tol);
  const auto& w = tr.grid.w;
  for (size_t i = 0; i < std::min(fs.size(), phis.size()); ++i) {
    const double a = phis[i].cwiseProduct(linearized_semigroup(tr, fs[i], s, t)).dot(w);
    const double b = adjoint_semigroup(tr, phis[i], s, t).cwiseProduct(fs[i]).dot(w);
    r.add(a - b, [&] { return "pair " + std::to_string(i); });
  }
  return r;
}

/// Poincare: Var_m(f) <= (1/K) sum F*(Df)^2 w.
template <int n>
CheckReport check_poincare(const NormField<n>& N, const Grid<n>& G, const GridFunction& f, double K,
                           double tol = 1e-12) {
  if (!G.normalized()) throw NotNormalized();
  if (!(K > 0.0)) throw CurvatureNotCertified("Poincare check needs K > 0");
  CheckReport r("poincare", CheckKind::inequality, tol);
  const double var = variance(G, f);
  const double dir = 2.0 * dirichlet_energy(N, G, f);
  r.add(dir / K - var);
  r.note = "var=" + std::to_string(var) + " dirichlet/K=" + std::to_string(dir / K);
  return r;
}

struct VarianceCurve {
  std::vector<double> t;
  std::vector<double> var;
  /// Least-squares slope of -log Var against t.
  double rate = 0.0;
};

template <int n>
VarianceCurve variance_curve(const FlowTrace<n>& tr, const GridFunction& f) {
  VarianceCurve c;
  GridFunction g = f;
  for (size_t k = 0; k < tr.states.size(); ++k) {
    if (k > 0) g = tr.steps[k - 1]->solve(g.cwiseProduct(tr.grid.w));
    c.t.push_back(tr.times[k]);
    c.var.push_back(variance(tr.grid, g));
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m = static_cast<double>(c.t.size());
  for (size_t k = 0; k < c.t.size(); ++k) {
    const double y = -std::log(c.var[k]);
    st += c.t[k], sy += y, stt += c.t[k] * c.t[k], sty += c.t[k] * y;
  }
  c.rate = (m * sty - st * sy) / (m * stt - st * st);
  return c;
}

/// Var(P_{0,t} f) <= e^{-2Kt/S_F} Var(f) (1 + eps_h) along the trace.
template <int n>
CheckReport check_variance_decay(const FlowTrace<n>& tr, const GridFunction& f, double K, double S_F,
                                 double eps_h = 5e-2) {
  CheckReport r("variance_decay", CheckKind::inequality, 0.0);
  const auto c = variance_curve(tr, f);
  for (size_t k = 0; k < c.t.size(); ++k) {
    const double bound = std::exp(-2.0 * K * c.t[k] / S_F) * c.var[0] * (1.0 + eps_h);
    r.add((bound - c.var[k]) / c.var[0], [&] { return "t=" + std::to_string(c.t[k]); });
  }
  r.note = "rate=" + std::to_string(c.rate) + " reference=" + std::to_string(2.0 * K / S_F);
  return r;
}

/// Columns t,variance,bound with bound = e^{-2Kt/S_F} Var(f).
std::string decay_csv(const VarianceCurve& c, double K, double S_F);

/// Measured exponential rate of Var(P_{0,t} f) against 2K/S_F (1 - margin).
template <int n>
CheckReport check_decay_rate(const FlowTrace<n>& tr, const GridFunction& f, double K, double S_F,
                             double margin = 0.05) {
  CheckReport r("variance_rate", CheckKind::inequality, 0.0);
  const auto c = variance_curve(tr, f);
  const double ref = 2.0 * K / S_F * (1.0 - margin);
  r.add(c.rate - ref, [&] { return "rate=" + std::to_string(c.rate); });
  r.note = "rate=" + std::to_string(c.rate) + " 2K/S_F=" + std::to_string(2.0 * K / S_F);
  return r;
}

/// c_alpha(t) = (1 - e^{-2Kt})/K + alpha e^{-2Kt}; 2t + alpha when K = 0.
inline double c_alpha(double alpha, double t, double K) {
  if (K == 0.0) return 2.0 * t + alpha;
  const double e = std::exp(-2.0 * K * t);
  return -std::expm1(-2.0 * K * t) / K + alpha * e;
}

/// sqrt(N^2(u_t) + alpha F^2(grad u_t)) <= P_{0,t}(sqrt(N^2(u_0) + c_alpha(t) F^2(grad u_0))).
template <int n>
CheckReport check_key_estimate(const NormField<n>& N, const FlowTrace<n>& tr, double alpha, double t,
                               double K, double tol) {
  const auto& G = tr.grid;
  auto clamp01 = [](const GridFunction& u) {
    if (u.minCoeff() < -1e-12 || u.maxCoeff() > 1.0 + 1e-12)
      throw BadRange("key estimate needs 0 <= u <= 1");
    return GridFunction(u.cwiseMax(0.0).cwiseMin(1.0));
  };
  const GridFunction u0 = clamp01(tr.states.front());
  const GridFunction ut = clamp01(tr.states[tr.step_index(t)]);
  const double ca = c_alpha(alpha, t, K);
  const GridFunction F0 = nodal_dual_norm_sq(N, G, u0), Ft = nodal_dual_norm_sq(N, G, ut);
  GridFunction z0(G.size()), zt(G.size());
  for (int i = 0; i < G.size(); ++i) {
    const double n0 = script_N(u0[i]), nt = script_N(ut[i]);
    z0[i] = std::sqrt(n0 * n0 + ca * F0[i]);
    zt[i] = std::sqrt(nt * nt + alpha * Ft[i]);
  }
  CheckReport r("key_estimate", CheckKind::inequality, tol);
  detail::add_nodewise(r, G, zt, linearized_semigroup(tr, z0, 0.0, t), true);
  r.note = "alpha=" + std::to_string(alpha) + " c_alpha=" + std::to_string(ca);
  return r;
}

// ---------------------------------------------------------------------------
// Characterization suite

template <int n>
struct CharacterizationConfig {
  ScalarField<n> u;                        // pointwise test function
  std::vector<Point<n>> points;            // pointwise samples
  int chart_points = 32;                   // curvature certification
  int directions = 16;
  std::array<int, n> nodes{};              // flow grid
  double dt = 1e-2;
  double T = 1.0;
  std::function<double(const Point<n>&)> u0;  // flow initial datum
  std::vector<std::pair<double, double>> windows{{0.0, 0.5}, {0.0, 1.0}, {0.5, 1.0}};
  double slack_C = kSlackC;
  double pointwise_tol = 1e-5;
};

/// Conditions (I)-(V) for the largest K certified by sampling (I), plus the
/// implications (III) => (II) (residual dominance) and (V) => (IV) (Jensen).
template <int n>
std::vector<CheckReport> characterization_suite(const NormField<n>& N,
                                                const CharacterizationConfig<n>& cfg) {
  std::vector<std::pair<Point<n>, Point<n>>> extra;
  for (const auto& x : cfg.points) {
    const Point<n> V = gradient(N, cfg.u, x);
    if (!is_zero_vector(V)) extra.push_back({x, V});
  }
  const auto bound = certify_curvature(N, kInfiniteN, cfg.chart_points, cfg.directions, extra);
  const double K = bound.K;
  std::vector<CheckReport> out;

  CheckReport I("char_I_ricci", CheckKind::inequality, 0.0);
  I.add(bound.sampled_min - K, [&] { return bound.witness; });
  I.samples = bound.samples;
  I.note = "K=" + std::to_string(K);
  out.push_back(I);

  auto II = check_bochner(N, cfg.u, K, kInfiniteN, cfg.points, cfg.pointwise_tol);
  II.name = "char_II_bochner";
  auto III = check_improved_bochner(N, cfg.u, K, cfg.points, cfg.pointwise_tol);
  III.name = "char_III_improved";
  out.push_back(II);
  out.push_back(III);

  CheckReport dom("char_III_implies_II", CheckKind::inequality, 1e-12);
  for (const auto& x : cfg.points) {
    BochnerTerms<n> b;
    try {
      b = bochner_terms(N, cfg.u, x);
    } catch (const CriticalPoint&) {
      continue;
    }
    dom.add(b.grad_F_sq, [&] { return describe<n>(x); });
  }
  out.push_back(dom);

  const auto G = make_grid<n>(N, cfg.nodes, true);
  FlowOptions<n> opt;
  opt.dt = cfg.dt;
  const auto tr = run_flow(N, G, sample(G, cfg.u0), cfg.T, opt);
  CheckReport IV("char_IV_l2", CheckKind::inequality, semigroup_slack(tr, cfg.slack_C));
  CheckReport V("char_V_l1", CheckKind::inequality, semigroup_slack(tr, cfg.slack_C));
  CheckReport jen("char_V_implies_IV", CheckKind::inequality, 1e-10);
  auto merge = [](CheckReport& into, const CheckReport& r, const std::string& tag) {
    if (r.samples == 0) return;
    const long before = into.samples;
    into.add(r.worst, [&] { return tag + " " + r.witness; });
    into.samples = before + r.samples;
    into.update();
  };
  for (const auto& [s, t] : cfg.windows) {
    const std::string tag = "s=" + std::to_string(s) + " t=" + std::to_string(t);
    merge(IV, check_l2_gradient(N, tr, s, t, K, cfg.slack_C), tag);
    merge(V, check_l1_gradient(N, tr, s, t, K, cfg.slack_C), tag);
    const GridFunction Fs = nodal_dual_norm_sq(N, G, tr.states[tr.step_index(s)]).cwiseSqrt();
    merge(jen, check_jensen(tr, Fs, s, t), tag);
  }
  IV.note = V.note = "K=" + std::to_string(K);
  out.push_back(IV);
  out.push_back(V);
  out.push_back(jen);
  return out;
}

}  // namespace finsler

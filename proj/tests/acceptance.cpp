// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/checks.hpp"
#include "finsler/gaussian.hpp"
#include "finsler/heat.hpp"
#include "finsler/isoperimetry.hpp"
#include "finsler/minkowski.hpp"
#include "finsler/models.hpp"

using namespace finsler;

namespace {

using P1 = Point<1>;
using P2 = Point<2>;
constexpr double kPi = std::numbers::pi;

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<P2> torus_points(const Chart<2>& c, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<P2> pts;
  for (int k = 0; k < count; ++k) {
    P2 x;
    for (int i = 0; i < 2; ++i) x[i] = std::uniform_real_distribution<double>(0.0, c.periods[i])(rng);
    pts.push_back(x);
  }
  return pts;
}

// u = sin x1 + 0.5 cos x2.
ScalarField<2> torus_u() {
  ScalarField<2> u;
  u.add_mode(1.0, P2(1, 0));
  u.add_mode(0.5, P2(0, 1), kPi / 2);
  return u;
}

double bump(double x, double a) {
  const double r = x / a;
  return std::abs(r) < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0;
}

std::vector<double> theta_grid() {
  std::vector<double> t;
  for (int k = 1; k <= 19; ++k) t.push_back(0.05 * k);
  return t;
}

NormField<1> line_on_R(NormField<1> N) {
  N.chart.kind = ChartKind::plane;
  return N;
}

double certified_K(const NormField<1>& N) { return certify_curvature(N, kInfiniteN, 64, 2).K; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---------------------------------------------------------------------------

void bochner_identity(Result& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto N = models::randers_torus(0.3);
  const auto rep = check_bochner_identity(N, torus_u(), torus_points(N.chart, 120, 3), 1e-4);
  const double secs = seconds_since(t0);
  r.require(rep.pass, "relative residual <= 1e-4");
  r.require(rep.samples >= 100, ">= 100 samples");
  r.require(secs < 30.0, "runtime < 30 s");
  r.detail << "samples=" << rep.samples << " max|r|=" << fmt(rep.worst) << " time=" << fmt(secs) << "s";
}

void improved_bochner(Result& r) {
  const auto N = models::randers_torus(0.3);
  const auto u = torus_u();
  const auto pts = torus_points(N.chart, 120, 3);
  std::vector<std::pair<P2, P2>> extra;
  for (const auto& x : pts) extra.push_back({x, gradient(N, u, x)});
  const auto cert = certify_curvature(N, kInfiniteN, 32, 16, extra);
  const auto imp = check_improved_bochner(N, u, cert.K, pts, 1e-5);
  const auto aux = check_improved_bochner_aux(N, u, pts, 1e-8);
  r.require(imp.pass, "improved residual >= -1e-5");
  r.require(aux.pass, "auxiliary residual >= -1e-8");
  r.detail << "K=" << fmt(cert.K) << " improved=" << fmt(imp.worst) << " aux=" << fmt(aux.worst)
           << " samples=" << imp.samples;
}

void norm_suite(Result& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, NormField<2>>> fams = {
      {"euclidean", NormField<2>::euclidean()},
      {"randers0.25", NormField<2>::randers(P2(0.25, 0.0))},
      {"randers0.5", NormField<2>::randers(P2(0.5, 0.0))},
      {"smoothed4", NormField<2>::smoothed(4.0, 0.1)},
  };
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> N01;
  auto rvec = [&] { return P2(N01(rng), N01(rng)); };
  for (const auto& [name, N] : fams) {
    double hom = 0, gvv = 0, euler = 0, rt = 0, fench = 0, lower = 0, pairing = 0;
    bool signed_fails = false;
    for (int s = 0; s < 200; ++s) {
      const P2 x = rvec(), v = rvec();
      const double F = N.F(x, v), c = 0.1 + 5.0 * std::abs(N01(rng));
      hom = std::max(hom, std::abs(N.F(x, c * v) - c * F) / (c * F));
      gvv = std::max(gvv, std::abs(v.dot(metric_tensor(N, x, v) * v) - F * F) / (F * F));
      const auto vj = vertical<2, double>(N, x, v);
      euler = std::max(euler, std::abs(v.dot(vj.Lv) / F - F) / F);
    }
    for (int s = 0; s < 50; ++s) {
      const P2 x = rvec(), a = rvec();
      const P2 v = legendre(N, x, a);
      const double fs = dual_norm(N, x, a);
      rt = std::max(rt, (legendre_inverse(N, x, v) - a).norm() / a.norm());
      pairing = std::max(pairing, std::abs(a.dot(v) - fs * fs) / (fs * fs));
      for (int k = 0; k < 1000; ++k) {
        const P2 w = rvec();
        const double Fw = N.F(x, w), Fmw = N.F(x, -w);
        fench = std::max(fench, (a.dot(w) - fs * Fw) / (fs * Fw));
        lower = std::max(lower, (-fs * Fmw - a.dot(w)) / (fs * Fmw));
        if (a.dot(w) < -fs * Fw * (1 + 1e-9)) signed_fails = true;
      }
    }
    // Sup duality at a fixed base direction.
    const P2 x0(0.3, 0.9), v0(0.6, 0.8);
    const auto g = metric_tensor(N, x0, v0);
    const Mat<double, 2> ginv = g.inverse();
    double s1 = 0, s2 = 0;
    for (int k = 0; k < 10000; ++k) {
      const double t = 2 * kPi * k / 10000;
      const P2 u(std::cos(t), std::sin(t));
      s1 = std::max(s1, u.dot(g * u) / std::pow(N.F(x0, u), 2));
      s2 = std::max(s2, std::pow(dual_norm(N, x0, u), 2) / u.dot(ginv * u));
    }
    const auto sc = smoothness_constants(N);
    const double rev_bound = std::min(std::sqrt(sc.S_F), std::sqrt(sc.C_F));
    const bool asymmetric = name.rfind("randers", 0) == 0;
    r.require(hom <= 1e-12, name + " homogeneity");
    r.require(gvv <= 1e-10, name + " g_v(v,v)=F^2");
    r.require(euler <= 1e-10, name + " Euler");
    r.require(rt <= 1e-8, name + " Legendre round trip");
    r.require(pairing <= 1e-10, name + " alpha(L*alpha)=F*^2");
    r.require(fench <= 1e-12, name + " Fenchel");
    r.require(lower <= 1e-12, name + " one-sided lower bound");
    r.require(!asymmetric || signed_fails, name + " signed bound counterexample");
    r.require(std::abs(s1 / s2 - 1.0) <= 0.02, name + " sup duality");
    r.require(sc.Lambda_F <= rev_bound + 1e-6, name + " Lambda_F <= min(sqrt S_F, sqrt C_F)");
    r.detail << name << "{Lambda=" << fmt(sc.Lambda_F) << " bound=" << fmt(rev_bound)
             << " sup_ratio=" << fmt(s1 / s2) << "} ";
  }
  const double secs = seconds_since(t0);
  r.require(secs < 60.0, "runtime < 60 s");
  r.detail << "time=" << fmt(secs) << "s";
}

void heat_oracle(Result& r) {
  const auto N = models::euclidean_circle();
  const auto G = make_grid(N, {512}, true);
  const auto u0 = sample(G, [](const P1& x) { return std::cos(x[0]); });
  const auto tr = run_flow(N, G, u0, 0.1, {.dt = 1e-4});
  const auto exact = sample(G, [](const P1& x) { return std::exp(-0.1) * std::cos(x[0]); });
  const double linf = (tr.states.back() - exact).cwiseAbs().maxCoeff();
  r.require(linf <= 1e-4, "L-inf <= 1e-4 at t = 0.1");
  r.require(tr.energy_monotone(), "energy monotone");
  r.require(tr.mass_drift() <= 1e-12, "mass drift <= 1e-12");

  // Non-expansion between two solutions, on a Riemannian and an asymmetric model.
  double worst_growth = -1e300;
  for (const auto& M : {models::gaussian_line(1.0), models::asymmetric_line(1.0)}) {
    const auto H = make_grid(M, {256}, true);
    const auto a0 = sample(H, [](const P1& x) { return std::sin(x[0]) + 0.2 * x[0]; });
    const auto b0 = sample(H, [](const P1& x) { return std::cos(2 * x[0]); });
    const auto a = run_flow(M, H, a0, 0.5, {.dt = 0.01});
    const auto b = run_flow(M, H, b0, 0.5, {.dt = 0.01});
    r.require(a.energy_monotone() && b.energy_monotone(), "energy monotone (line models)");
    r.require(std::max(a.mass_drift(), b.mass_drift()) <= 1e-12, "mass drift (line models)");
    double prev = l2_norm(H, GridFunction(a0 - b0));
    for (size_t k = 1; k < a.states.size(); ++k) {
      const double d = l2_norm(H, GridFunction(a.states[k] - b.states[k]));
      worst_growth = std::max(worst_growth, (d - prev) / prev);
      prev = d;
    }
  }
  r.require(worst_growth <= 1e-12, "L2 distance non-increasing");
  r.detail << "linf=" << fmt(linf) << " drift=" << fmt(tr.mass_drift())
           << " max_rel_L2_growth=" << fmt(worst_growth);
}

void duality_jensen(Result& r) {
  const auto A = models::asymmetric_line(1.0);
  const auto G = make_grid(A, {200}, true);
  const auto tr = run_flow(A, G, sample(G, [](const P1& x) { return std::sin(x[0]); }), 0.5, {.dt = 0.01});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N01;
  auto rf = [&] {
    GridFunction f(G.size());
    for (auto& v : f) v = N01(rng);
    return f;
  };
  std::vector<GridFunction> fs, phis;
  for (int s = 0; s < 10; ++s) fs.push_back(rf()), phis.push_back(rf());
  const auto pair = check_adjoint_pairing(tr, fs, phis, 0.1, 0.5, 1e-11);
  double jensen = std::numeric_limits<double>::infinity();
  for (const auto& f : fs) jensen = std::min(jensen, check_jensen(tr, f, 0.0, 0.5, 1e-10).worst);
  r.require(pair.pass, "adjoint pairing <= 1e-11");
  r.require(jensen >= -1e-10, "Jensen >= -1e-10");
  r.detail << "pairing=" << fmt(pair.worst) << " jensen_min=" << fmt(jensen);
}

void gradient_estimates(Result& r) {
  const auto cal = calibrate_slack();
  r.require(cal.C <= kSlackC, "calibrated K=0 slack <= frozen C");
  const auto N = models::gaussian_line(1.0);
  const double K = certified_K(N);
  const auto G = make_grid(N, {1024}, true);
  const std::vector<std::pair<double, double>> windows{{0.0, 0.5}, {0.0, 1.0}, {0.5, 1.0}};
  double l2 = 1e300, l1 = 1e300, l1_false = 1e300;
  bool falsified = false;
  const std::vector<std::function<double(const P1&)>> data{
      [](const P1& x) { return x[0]; },
      [](const P1& x) { return std::sin(x[0]) + 0.5 * x[0]; }};
  for (size_t d = 0; d < data.size(); ++d) {
    const auto tr = run_flow(N, G, sample(G, data[d]), 1.0, {.dt = 1e-3});
    for (const auto& [s, t] : windows) {
      const auto a = check_l2_gradient(N, tr, s, t, K);
      const auto b = check_l1_gradient(N, tr, s, t, K);
      r.require(a.pass && b.pass, "L2/L1 within C(h+dt)");
      l2 = std::min(l2, a.worst), l1 = std::min(l1, b.worst);
      if (d == 0) {
        const auto f = check_l1_gradient(N, tr, s, t, 2.0);
        l1_false = std::min(l1_false, f.worst);
        falsified = falsified || !f.pass;
      }
    }
  }
  r.require(falsified, "declared K=2 fails L1");
  const double tol = kSlackC * (grid_scale(G) + 1e-3);
  r.detail << "K=" << fmt(K) << " C_fit=" << fmt(cal.C) << " C=" << fmt(kSlackC) << " tol=" << fmt(tol)
           << " l2_min=" << fmt(l2) << " l1_min=" << fmt(l1) << " K2_l1_min=" << fmt(l1_false);
}

void poincare(Result& r) {
  const auto N = models::gaussian_line(1.0);
  const auto G = make_grid(N, {1024}, true);
  const auto cert = certify_curvature(N, kInfiniteN, 64, 2);
  // Near-equality uses the sharp constant: Ric_inf = 1 identically on this model.
  const auto fx = sample(G, [](const P1& x) { return x[0]; });
  const double gap = 2.0 * dirichlet_energy(N, G, fx) / 1.0 - variance(G, fx);
  r.require(std::abs(cert.sampled_min - 1.0) <= 1e-8, "sampled Ric_inf = 1");
  r.require(gap >= -1e-12 && gap <= 2e-3, "gap for f(x)=x in [0, 2e-3]");
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N01;
  const double L = N.chart.half_width;
  double worst = 1e300;
  for (int s = 0; s < 20; ++s) {
    std::vector<double> a(8), b(8);
    for (int k = 0; k < 8; ++k) a[k] = N01(rng), b[k] = N01(rng);
    const auto f = sample(G, [&](const P1& x) {
      double v = 0.0;
      for (int k = 0; k < 8; ++k) {
        const double w = (k + 1) * kPi * (x[0] + L) / (2 * L);
        v += a[k] * std::cos(w) + b[k] * std::sin(w);
      }
      return v;
    });
    const auto rep = check_poincare(N, G, f, cert.K, 1e-12);
    r.require(rep.pass, "random band-limited f");
    worst = std::min(worst, rep.worst);
  }
  r.detail << "gap=" << fmt(gap) << " sampled_ric=" << fmt(cert.sampled_min) << " random_min=" << fmt(worst) << " K=" << fmt(cert.K);
}

void variance_rate(Result& r) {
  for (const auto& [name, N] : {std::pair{std::string("gaussian"), models::gaussian_line(1.0)},
                                std::pair{std::string("asymmetric"), models::asymmetric_line(1.0)}}) {
    const auto G = make_grid(N, {512}, true);
    const double S_F = smoothness_constants(N).S_F;
    const double K = certified_K(N);
    const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return std::sin(x[0]); }), 2.0, {.dt = 1e-2});
    const auto f = sample(G, [](const P1& x) { return std::cos(x[0]) + x[0]; });
    const auto rate = check_decay_rate(tr, f, K, S_F, 0.05);
    r.require(rate.pass, name + " rate >= 0.95 2K/S_F");
    r.detail << name << "{S_F=" << fmt(S_F) << " K=" << fmt(K) << " " << rate.note << "} ";
  }
  r.require(std::abs(smoothness_constants(models::gaussian_line(1.0)).S_F - 1.0) <= 1e-12,
            "gaussian S_F = 1");
}

void key_estimate(Result& r) {
  const auto N = models::gaussian_line(1.0);
  const double K = certified_K(N);
  const auto G = make_grid(N, {1024}, true);
  const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return bump(x[0], 2.0); }), 1.0, {.dt = 1e-3});
  double worst = 1e300;
  for (double alpha : {0.0, 1.0 / K})
    for (double t : {0.1, 0.5, 1.0}) {
      const auto rep = check_key_estimate(N, tr, alpha, t, K, 2e-3);
      r.require(rep.pass, "nodewise bound alpha=" + fmt(alpha) + " t=" + fmt(t));
      worst = std::min(worst, rep.worst);
    }
  double stationary = 0.0;
  for (int k = 0; k <= 100; ++k)
    stationary = std::max(stationary, std::abs(c_alpha(1.0 / K, 0.01 * k, K) - 1.0 / K) * K);
  r.require(stationary <= 4 * std::numeric_limits<double>::epsilon(), "c_{1/K} = 1/K");
  r.detail << "K=" << fmt(K) << " worst=" << fmt(worst) << " c_{1/K}_rel_dev=" << fmt(stationary);
}

void bakry_ledoux(Result& r) {
  const auto S = line_on_R(models::gaussian_line(1.0));
  double sym = 0.0;
  for (double th : theta_grid())
    for (Sweep s : {Sweep::forward, Sweep::backward})
      sym = std::max(sym, std::abs(halfline_profile_at(S, s, th).boundary - gaussian_profile(1.0, th)));
  r.require(sym <= 1e-8, "symmetric profile = I_K to 1e-8");

  auto improvement = [](const std::vector<ProfilePoint>& prof, double K, double Lambda) {
    double m = 1e300;
    for (const auto& p : prof) m = std::min(m, gaussian_profile(K, p.theta) * (1.0 - 1.0 / Lambda));
    return m;
  };

  const auto A = line_on_R(models::asymmetric_line(1.0, 1.0, 2.0));
  const double KA = certified_isoperimetric_K(A);
  const auto profA = halfline_profile(A, theta_grid());
  const auto bl1 = check_bakry_ledoux(A, profA, 1.0, KA, 1e-6);
  const double LA = smoothness_constants(A).Lambda_F;
  const auto nd1 = check_needle_bound(profA, KA, LA);
  r.require(bl1.pass, "asymmetric >= I_Keff - 1e-6");
  r.require(nd1.pass && LA > 1.0 && improvement(profA, KA, LA) > 0.0, "asymmetric improves on I_K/Lambda_F");

  const auto P = models::randers_gaussian_plane(1.0);
  const auto G = isoperimetry_grid<2>(P, {256, 256});
  const double KP = certified_isoperimetric_K(P);
  const auto profP = halfplane_profile(P, G, theta_grid());
  const auto bl2 = check_bakry_ledoux(P, profP, G.total_weight(), KP, 5e-2);
  const double LP = smoothness_constants(P).Lambda_F;
  const auto nd2 = check_needle_bound(profP, KP, LP);
  r.require(bl2.pass, "2D grid >= I_K - 5e-2");
  r.require(nd2.pass && LP > 1.0 && improvement(profP, KP, LP) > 0.0, "2D improves on I_K/Lambda_F");

  r.detail << "sym_err=" << fmt(sym) << " asym{K=" << fmt(KA) << " worst=" << fmt(bl1.worst)
           << " Lambda=" << fmt(LA) << " gain=" << fmt(improvement(profA, KA, LA)) << "} 2d{K=" << fmt(KP)
           << " worst=" << fmt(bl2.worst) << " Lambda=" << fmt(LP) << " gain=" << fmt(improvement(profP, KP, LP))
           << "}";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Result&)>>> criteria = {
      {"bochner_weitzenboeck_identity", bochner_identity},
      {"improved_bochner", improved_bochner},
      {"euler_legendre_duality_suite", norm_suite},
      {"heat_flow_oracle", heat_oracle},
      {"semigroup_duality_jensen", duality_jensen},
      {"l2_l1_gradient_estimates", gradient_estimates},
      {"poincare", poincare},
      {"variance_decay_rate", variance_rate},
      {"key_estimate", key_estimate},
      {"bakry_ledoux", bakry_ledoux},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Result r;
    try {
      run(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << "[exception: " << e.what() << "]";
    }
    std::printf("%s %-32s %s\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.str().c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}

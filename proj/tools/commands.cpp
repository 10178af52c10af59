#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <random>
#include <sstream>

#include "finsler/checks.hpp"
#include "finsler/csv.hpp"
#include "finsler/isoperimetry.hpp"

namespace finsler::lab {

namespace {

std::string fmt(double x) { return csv_num(x); }

template <int n>
Point<n> vec(const std::vector<double>& v, const Point<n>& fallback) {
  if (v.empty()) return fallback;
  Point<n> p;
  for (int i = 0; i < n; ++i) p[i] = v[i];
  return p;
}

template <int n>
std::function<double(const Point<n>&)> initial_datum(const RunConfig& cfg) {
  if (cfg.u0_bump > 0.0) {
    const double a = cfg.u0_bump;
    return [a](const Point<n>& x) {
      const double r2 = x.squaredNorm() / (a * a);
      return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    };
  }
  const auto e = build_expr<n>(cfg.u0);
  return [e](const Point<n>& x) { return e(x); };
}

template <int n>
std::array<int, n> grid_nodes(const RunConfig& cfg) {
  if (cfg.nodes.empty()) throw ConfigError("grid.nodes is required");
  std::array<int, n> a{};
  for (int i = 0; i < n; ++i) a[i] = cfg.nodes[i];
  return a;
}

template <int n>
FlowOptions<n> flow_options(const RunConfig& cfg) {
  FlowOptions<n> opt;
  opt.dt = cfg.dt;
  opt.solver = cfg.linear == "cg" ? LinearSolver::cg : LinearSolver::direct;
  return opt;
}

// Uniform points in the chart (95% of the box for non-periodic charts).
template <int n>
std::vector<Point<n>> random_points(const Chart<n>& c, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point<n>> pts;
  for (int k = 0; k < count; ++k) {
    Point<n> x;
    for (int i = 0; i < n; ++i) {
      if (c.kind == ChartKind::torus)
        x[i] = std::uniform_real_distribution<double>(0.0, c.periods[i])(rng);
      else
        x[i] = std::uniform_real_distribution<double>(-0.95 * c.half_width, 0.95 * c.half_width)(rng);
    }
    pts.push_back(x);
  }
  return pts;
}

// Random trigonometric polynomial with 8 modes per axis.
template <int n>
GridFunction band_limited(const NormField<n>& N, const Grid<n>& G, std::mt19937_64& rng) {
  std::normal_distribution<double> N01;
  std::array<std::array<double, 16>, n> c;
  for (auto& axis : c)
    for (auto& x : axis) x = N01(rng);
  return sample(G, [&](const Point<n>& x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double base = N.chart.kind == ChartKind::torus ? 2.0 * std::numbers::pi / N.chart.periods[i]
                                                           : std::numbers::pi / N.chart.half_width;
      for (int k = 0; k < 8; ++k)
        s += c[i][k] * std::sin((k + 1) * base * x[i]) + c[i][8 + k] * std::cos((k + 1) * base * x[i]);
    }
    return s;
  });
}

std::vector<double> theta_grid(const RunConfig& cfg) {
  if (!cfg.thetas.empty()) return cfg.thetas;
  std::vector<double> t;
  for (int k = 1; k <= 19; ++k) t.push_back(0.05 * k);
  return t;
}

CheckReport failed(const std::string& name, const std::string& why) {
  CheckReport r(name, CheckKind::inequality, 0.0);
  r.pass = false;
  r.note = why;
  return r;
}

struct SuiteResult {
  std::vector<CheckReport> reports;
  std::vector<std::pair<std::string, std::string>> files;
  std::string usage_error;  // set when a prerequisite of the suite is not met
};

template <int n>
class Verifier {
 public:
  explicit Verifier(const RunConfig& cfg) : cfg_(cfg), N_(build_norm<n>(cfg)) {}

  bool needs_flow(const std::string& s) const {
    return s == "l2" || s == "l1" || s == "variance" || s == "key";
  }

  void prepare(const std::vector<std::string>& suites) {
    const bool grid = std::any_of(suites.begin(), suites.end(),
                                  [&](const std::string& s) { return needs_flow(s) || s == "poincare"; });
    if (grid) G_ = make_grid<n>(N_, grid_nodes<n>(cfg_), true);
    if (std::any_of(suites.begin(), suites.end(), [&](const std::string& s) { return needs_flow(s); }))
      trace_ = run_flow(N_, G_, sample(G_, initial_datum<n>(cfg_)), cfg_.T, flow_options<n>(cfg_));
    bool flowK = std::any_of(suites.begin(), suites.end(), [&](const std::string& s) {
      return needs_flow(s) || s == "poincare" || s == "improved";
    });
    if (flowK) K_inf_ = resolve_K(kInfiniteN);
    if (std::find(suites.begin(), suites.end(), "bochner") != suites.end()) K_N_ = resolve_K(cfg_.Nparam);
  }

  SuiteResult run(const std::string& suite) const {
    SuiteResult out;
    try {
      if (suite == "bochner") {
        const auto pts = points();
        const auto u = build_expr<n>(cfg_.u);
        out.reports.push_back(check_bochner_identity(N_, u, pts, cfg_.tol_identity));
        out.reports.push_back(check_bochner(N_, u, K_N_, cfg_.Nparam, pts, cfg_.tol_bochner));
      } else if (suite == "improved") {
        const auto pts = points();
        const auto u = build_expr<n>(cfg_.u);
        out.reports.push_back(check_improved_bochner(N_, u, K_inf_, pts, cfg_.tol_bochner));
        out.reports.push_back(check_improved_bochner_aux(N_, u, pts, cfg_.tol_aux));
      } else if (suite == "l2" || suite == "l1") {
        std::vector<std::pair<double, double>> windows;
        for (size_t k = 0; k + 1 < cfg_.windows.size(); k += 2) {
          const double s = cfg_.windows[k], t = cfg_.windows[k + 1];
          windows.push_back({s, t});
          auto r = suite == "l2" ? check_l2_gradient(N_, trace_, s, t, K_inf_, cfg_.slack_C)
                                 : check_l1_gradient(N_, trace_, s, t, K_inf_, cfg_.slack_C);
          r.note = "s=" + fmt(s) + " t=" + fmt(t) + " K=" + fmt(K_inf_);
          out.reports.push_back(r);
        }
        const auto p = suite == "l2" ? GradientNorm::l2 : GradientNorm::l1;
        out.files.push_back({suite + "_residuals.csv", gradient_residuals_csv(N_, trace_, windows, K_inf_, p)});
      } else if (suite == "poincare") {
        auto r = check_poincare(N_, G_, sample(G_, initial_datum<n>(cfg_)), K_inf_, cfg_.tol_poincare);
        r.note = "f=u0 K=" + fmt(K_inf_);
        out.reports.push_back(r);
        std::mt19937_64 rng(cfg_.seed);
        for (int k = 0; k < cfg_.poincare_random; ++k) {
          auto rk = check_poincare(N_, G_, band_limited(N_, G_, rng), K_inf_, cfg_.tol_poincare);
          rk.note = "f=random" + std::to_string(k);
          out.reports.push_back(rk);
        }
      } else if (suite == "variance") {
        const double S_F = smoothness().S_F;
        const auto f = sample(G_, initial_datum<n>(cfg_));
        auto r = check_variance_decay(trace_, f, K_inf_, S_F, cfg_.variance_eps);
        r.note = "K=" + fmt(K_inf_) + " S_F=" + fmt(S_F);
        out.reports.push_back(r);
        out.reports.push_back(check_decay_rate(trace_, f, K_inf_, S_F, cfg_.decay_margin));
        out.files.push_back({"decay.csv", decay_csv(variance_curve(trace_, f), K_inf_, S_F)});
      } else if (suite == "key") {
        for (double alpha : cfg_.key_alpha)
          for (double t : cfg_.key_times) {
            auto r = check_key_estimate(N_, trace_, alpha, t, K_inf_, cfg_.tol_key);
            r.note += " t=" + fmt(t);
            out.reports.push_back(r);
          }
      } else if (suite == "char") {
        CharacterizationConfig<n> c;
        c.u = build_expr<n>(cfg_.u);
        c.points = points();
        c.chart_points = cfg_.chart_points;
        c.directions = cfg_.directions;
        c.nodes = grid_nodes<n>(cfg_);
        c.dt = cfg_.dt;
        c.T = cfg_.T;
        c.u0 = initial_datum<n>(cfg_);
        c.windows.clear();
        for (size_t k = 0; k + 1 < cfg_.windows.size(); k += 2) c.windows.push_back({cfg_.windows[k], cfg_.windows[k + 1]});
        c.slack_C = cfg_.slack_C;
        c.pointwise_tol = cfg_.tol_bochner;
        out.reports = characterization_suite(N_, c);
      } else if (suite == "isoperimetry") {
        auto [reports, csv] = isoperimetry();
        out.reports = std::move(reports);
        out.files.push_back({"profile.csv", std::move(csv)});
      }
    } catch (const CurvatureNotCertified& e) {
      out.reports.push_back(failed(suite, std::string("CurvatureNotCertified: ") + e.what()));
    } catch (const SolverDiverged& e) {
      out.reports.push_back(failed(suite, std::string("SolverDiverged: ") + e.what()));
    } catch (const NoConvergence& e) {
      out.reports.push_back(failed(suite, std::string("NoConvergence: ") + e.what()));
    } catch (const Error& e) {
      out.usage_error = suite + ": " + e.what();
    }
    return out;
  }

  std::pair<std::vector<CheckReport>, std::string> isoperimetry() const {
    const double K = std::isnan(cfg_.K) ? certified_isoperimetric_K(N_) : cfg_.K;
    const double Lambda = smoothness().Lambda_F;
    std::vector<ProfilePoint> prof;
    double mass = 1.0;
    if constexpr (n == 1) {
      if (N_.chart.kind == ChartKind::torus) throw ConfigError("isoperimetry needs an interval or plane chart");
      prof = halfline_profile(N_, theta_grid(cfg_));
    } else {
      const auto G = isoperimetry_grid<n>(N_, grid_nodes<n>(cfg_));
      mass = G.total_weight();
      prof = halfplane_profile(N_, G, theta_grid(cfg_), cfg_.half_plane_directions);
    }
    std::vector<CheckReport> r;
    auto bl = check_bakry_ledoux(N_, prof, mass, K, cfg_.tol_bakry_ledoux);
    r.push_back(bl);
    r.push_back(check_needle_bound(prof, K, Lambda));
    return {r, profile_csv(prof, K, Lambda)};
  }

  SmoothnessConstants<n> smoothness() const {
    return smoothness_constants(N_, SmoothnessOptions{cfg_.norm_chart_points, cfg_.norm_directions, 5});
  }

  std::vector<Point<n>> points() const { return random_points<n>(N_.chart, cfg_.points, cfg_.seed); }

  double resolve_K(double Nparam) const {
    if (!std::isnan(cfg_.K)) return cfg_.K;
    std::vector<std::pair<Point<n>, Point<n>>> extra;
    const auto u = build_expr<n>(cfg_.u);
    for (const auto& x : points()) {
      const Point<n> V = gradient(N_, u, x);
      if (!is_zero_vector(V)) extra.push_back({x, V});
    }
    return certify_curvature(N_, Nparam, cfg_.chart_points, cfg_.directions, extra).K;
  }

  const NormField<n>& norm() const { return N_; }

 private:
  const RunConfig& cfg_;
  NormField<n> N_;
  Grid<n> G_;
  FlowTrace<n> trace_;
  double K_inf_ = 0.0, K_N_ = 0.0;
};

template <int n>
Output verify(const RunConfig& cfg) {
  Output out;
  if (cfg.suites.empty()) {
    out.code = kUsage;
    out.text = "no suites selected (checks.suites is empty)\n";
    return out;
  }
  Verifier<n> v(cfg);
  try {
    v.prepare(cfg.suites);
  } catch (const SolverDiverged& e) {
    out.code = kCheckFailed;
    out.text = std::string("SolverDiverged: ") + e.what() + "\n";
    return out;
  }
  // One task per suite; results are collected in the configured order.
  std::vector<std::future<SuiteResult>> tasks;
  for (const auto& s : cfg.suites) tasks.push_back(std::async(std::launch::async, [&v, s] { return v.run(s); }));
  std::vector<CheckReport> reports;
  for (auto& t : tasks) {
    auto r = t.get();
    if (!r.usage_error.empty()) {
      out.code = kUsage;
      out.text += r.usage_error + "\n";
    }
    reports.insert(reports.end(), r.reports.begin(), r.reports.end());
    out.files.insert(out.files.end(), r.files.begin(), r.files.end());
  }
  if (out.code == kUsage) return out;
  out.files.insert(out.files.begin(), {"verify_summary.txt", reports_summary(reports)});
  out.files.insert(out.files.begin(), {"verify.csv", reports_csv(reports)});
  out.text = reports_summary(reports);
  out.code = all_pass(reports) ? kPass : kCheckFailed;
  return out;
}

template <int n>
Output norm_info(const RunConfig& cfg) {
  const auto N = build_norm<n>(cfg);
  const auto sc = smoothness_constants(N, SmoothnessOptions{cfg.norm_chart_points, cfg.norm_directions, 5});
  const double bound = std::min(std::sqrt(sc.S_F), std::sqrt(sc.C_F));
  const bool ok = sc.Lambda_F <= bound + 1e-6;
  Output out;
  std::string csv;
  CsvWriter w(csv);
  w.header({"S_F", "C_F", "Lambda_F", "reversibility_bound", "pass"});
  w.cell(sc.S_F).cell(sc.C_F).cell(sc.Lambda_F).cell(bound).cell(ok ? 1 : 0).end();
  out.files.push_back({"norm_info.csv", csv});
  out.text = "family " + cfg.family + "\nS_F = " + fmt(sc.S_F) + "\nC_F = " + fmt(sc.C_F) +
             "\nLambda_F = " + fmt(sc.Lambda_F) + "\nLambda_F <= min(sqrt S_F, sqrt C_F) = " + fmt(bound) +
             (ok ? ": PASS\n" : ": FAIL\n");
  out.code = ok ? kPass : kCheckFailed;
  return out;
}

template <int n>
Output geodesic(const RunConfig& cfg) {
  const auto N = build_norm<n>(cfg);
  const Point<n> x0 = vec<n>(cfg.x0, Point<n>::Zero());
  const Point<n> v0 = vec<n>(cfg.v0, Point<n>::Unit(0));
  Output out;
  std::vector<GeodesicState<n>> path;
  try {
    path = geodesic_shoot(N, x0, v0, cfg.geodesic_T, cfg.geodesic_dt);
  } catch (const LeftChart&) {
    out.code = kCheckFailed;
    out.text = "geodesic left the chart before T\n";
    return out;
  }
  std::string csv;
  CsvWriter w(csv);
  if constexpr (n == 1)
    w.header({"t", "x1", "v1", "F"});
  else
    w.header({"t", "x1", "x2", "v1", "v2", "F"});
  const double F0 = N.F(x0, v0);
  double drift = 0.0;
  for (const auto& s : path) {
    w.cell(s.t);
    for (int i = 0; i < n; ++i) w.cell(s.x[i]);
    for (int i = 0; i < n; ++i) w.cell(s.v[i]);
    const double F = N.F(s.x, s.v);
    drift = std::max(drift, std::abs(F - F0) / F0);
    w.cell(F).end();
  }
  out.files.push_back({"geodesic.csv", csv});
  // Geodesics have constant speed.
  const bool ok = drift <= 1e-6;
  out.text = "steps " + std::to_string(path.size() - 1) + "\nrelative speed drift " + fmt(drift) +
             (ok ? " (<= 1e-6): PASS\n" : " (> 1e-6): FAIL\n");
  out.code = ok ? kPass : kCheckFailed;
  return out;
}

template <int n>
Output curvature(const RunConfig& cfg) {
  const auto N = build_norm<n>(cfg);
  std::string csv;
  CsvWriter w(csv);
  if constexpr (n == 1)
    w.header({"x1", "v1", "F", "ricci", "ric_inf", "ric_N"});
  else
    w.header({"x1", "x2", "v1", "v2", "F", "ricci", "ric_inf", "ric_N"});
  for (const auto& x : N.chart.sample_points(cfg.chart_points))
    for (const auto& v : detail::sphere_directions<n>(cfg.directions)) {
      for (int i = 0; i < n; ++i) w.cell(x[i]);
      for (int i = 0; i < n; ++i) w.cell(v[i]);
      const double ri = weighted_ricci(N, x, v, kInfiniteN);
      w.cell(N.F(x, v)).cell(ricci(N, x, v)).cell(ri);
      w.cell(std::isinf(cfg.Nparam) ? ri : weighted_ricci(N, x, v, cfg.Nparam)).end();
    }
  const auto b = certify_curvature(N, cfg.Nparam, cfg.chart_points, cfg.directions);
  Output out;
  out.files.push_back({"curvature.csv", csv});
  out.text = "N = " + fmt(cfg.Nparam) + "\nsamples " + std::to_string(b.samples) + "\nmin Ric_N/F^2 = " +
             fmt(b.sampled_min) + " at " + b.witness + "\ncertified K = " + fmt(b.K) + "\n";
  return out;
}

template <int n>
Output heat(const RunConfig& cfg) {
  const auto N = build_norm<n>(cfg);
  const auto G = make_grid<n>(N, grid_nodes<n>(cfg), true);
  Output out;
  FlowTrace<n> tr;
  try {
    tr = run_flow(N, G, sample(G, initial_datum<n>(cfg)), cfg.T, flow_options<n>(cfg));
  } catch (const SolverDiverged& e) {
    out.code = kCheckFailed;
    out.text = std::string("SolverDiverged: ") + e.what() + "\n";
    return out;
  }
  out.files.push_back({"trace.csv", trace_csv(tr, cfg.stride)});
  out.files.push_back({"energies.csv", energies_csv(tr)});
  std::string why;
  out.code = heat_gate(tr, &why);
  out.text = "steps " + std::to_string(tr.times.size() - 1) + "\nenergy " + fmt(tr.energies.front()) + " -> " +
             fmt(tr.energies.back()) + "\nmass drift " + fmt(tr.mass_drift()) + "\n" +
             (out.code == kPass ? "PASS\n" : "FAIL: " + why + "\n");
  return out;
}

template <int n>
Output isoperimetry(const RunConfig& cfg) {
  Verifier<n> v(cfg);
  auto [reports, csv] = v.isoperimetry();
  Output out;
  out.files.push_back({"profile.csv", csv});
  out.text = reports_summary(reports);
  out.code = all_pass(reports) ? kPass : kCheckFailed;
  return out;
}

template <template <int> class Fn>
Output dispatch(const RunConfig& cfg) {
  if (cfg.dim == 1) return Fn<1>{}(cfg);
  return Fn<2>{}(cfg);
}

#define FINSLER_COMMAND(name)                                        \
  template <int n>                                                   \
  struct name##_fn {                                                 \
    Output operator()(const RunConfig& cfg) const { return name<n>(cfg); } \
  };
FINSLER_COMMAND(norm_info)
FINSLER_COMMAND(geodesic)
FINSLER_COMMAND(curvature)
FINSLER_COMMAND(heat)
FINSLER_COMMAND(verify)
FINSLER_COMMAND(isoperimetry)
#undef FINSLER_COMMAND

}  // namespace

Output cmd_norm_info(const RunConfig& cfg) { return dispatch<norm_info_fn>(cfg); }
Output cmd_geodesic(const RunConfig& cfg) { return dispatch<geodesic_fn>(cfg); }
Output cmd_curvature(const RunConfig& cfg) { return dispatch<curvature_fn>(cfg); }
Output cmd_heat(const RunConfig& cfg) { return dispatch<heat_fn>(cfg); }
Output cmd_verify(const RunConfig& cfg) { return dispatch<verify_fn>(cfg); }
Output cmd_isoperimetry(const RunConfig& cfg) { return dispatch<isoperimetry_fn>(cfg); }

void write_outputs(const Output& out, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, content] : out.files) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (fs::path(dir) / name).string());
    f << content;
  }
}

}  // namespace finsler::lab

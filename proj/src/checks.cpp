#include "finsler/checks.hpp"

#include <cstdio>

#include "finsler/csv.hpp"
#include "finsler/models.hpp"

namespace finsler {

std::string reports_csv(const std::vector<CheckReport>& reports) {
  std::string out;
  CsvWriter w(out);
  w.header({"name", "samples", "residual", "tolerance", "pass"});
  for (const auto& r : reports)
    w.cell(r.name).cell(static_cast<long long>(r.samples)).cell(r.worst).cell(r.tolerance).cell(r.pass ? 1 : 0).end();
  return out;
}

std::string reports_summary(const std::vector<CheckReport>& reports) {
  std::string out;
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-4s %-24s samples=%-7ld %s=%-12.4e tol=%-10.3e", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.samples, r.kind == CheckKind::inequality ? "worst" : "max|r|", r.worst,
                  r.tolerance);
    out += buf;
    if (!r.witness.empty()) out += " at " + r.witness;
    if (!r.note.empty()) out += " (" + r.note + ")";
    out += '\n';
  }
  return out;
}

bool all_pass(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return !reports.empty();
}

std::string describe_point(const double* x, int n) {
  std::string s = "(";
  char buf[32];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    s += buf;
    if (i + 1 < n) s += ", ";
  }
  return s + ")";
}

namespace {

// Heat flow of |sin x| on the circle: |sin x| = 2/pi - (4/pi) sum cos(2kx)/(4k^2 - 1).
double heat_abs_sin(double x, double tau) {
  const double pi = std::numbers::pi;
  double s = 2.0 / pi;
  for (int k = 1; k <= 20000; ++k) {
    const double decay = std::exp(-4.0 * k * k * tau);
    if (decay < 1e-18 && k > 10) break;
    s -= 4.0 / pi * decay * std::cos(2.0 * k * x) / (4.0 * k * k - 1.0);
  }
  return s;
}

}  // namespace

SlackCalibration calibrate_slack(int nodes, double dt) {
  const auto N = models::euclidean_circle();
  const auto G = make_grid(N, {nodes}, true);
  const auto u0 = sample(G, [](const Point<1>& x) { return std::cos(x[0]); });
  const auto tr = run_flow(N, G, u0, 1.0, FlowOptions<1>{.dt = dt});
  SlackCalibration c;
  c.h = G.h[0];
  c.dt = dt;
  const std::pair<double, double> windows[] = {{0.0, 0.25}, {0.0, 0.5}, {0.0, 1.0}, {0.5, 1.0}};
  for (const auto& [s, t] : windows) {
    const GridFunction F2s = nodal_dual_norm_sq(N, G, tr.states[tr.step_index(s)]);
    const GridFunction F2t = nodal_dual_norm_sq(N, G, tr.states[tr.step_index(t)]);
    const GridFunction P2 = linearized_semigroup(tr, F2s, s, t);
    const GridFunction P1 = linearized_semigroup(tr, GridFunction(F2s.cwiseSqrt()), s, t);
    for (int k = 0; k < G.size(); ++k) {
      const double x = G.point(k)[0];
      const double sn = std::sin(x);
      // Exact: F^2(grad u_t) = e^{-2t} sin^2 x, P_{s,t}(e^{-2s} sin^2) = e^{-2s}(1 - e^{-4(t-s)} cos 2x)/2.
      const double e2 = std::abs(F2t[k] - std::exp(-2 * t) * sn * sn) +
                        std::abs(P2[k] - std::exp(-2 * s) * 0.5 * (1 - std::exp(-4 * (t - s)) * std::cos(2 * x)));
      const double e1 = std::abs(std::sqrt(F2t[k]) - std::exp(-t) * std::abs(sn)) +
                        std::abs(P1[k] - std::exp(-s) * heat_abs_sin(x, t - s));
      c.worst_error = std::max({c.worst_error, e2, e1});
    }
  }
  c.C = c.worst_error / (c.h + c.dt);
  return c;
}

std::string decay_csv(const VarianceCurve& c, double K, double S_F) {
  std::string out;
  CsvWriter w(out);
  w.header({"t", "variance", "bound"});
  for (size_t k = 0; k < c.t.size(); ++k)
    w.cell(c.t[k]).cell(c.var[k]).cell(std::exp(-2.0 * K * c.t[k] / S_F) * c.var[0]).end();
  return out;
}

template <int n>
std::string gradient_residuals_csv(const NormField<n>& N, const FlowTrace<n>& tr,
                                   const std::vector<std::pair<double, double>>& windows, double K,
                                   GradientNorm p) {
  std::string out;
  CsvWriter w(out);
  if constexpr (n == 1)
    w.header({"estimate", "s", "t", "node", "x1", "lhs", "rhs", "residual"});
  else
    w.header({"estimate", "s", "t", "node", "x1", "x2", "lhs", "rhs", "residual"});
  const char* name = p == GradientNorm::l2 ? "l2" : "l1";
  for (const auto& [s, t] : windows) {
    const auto [lhs, rhs] = gradient_estimate_sides(N, tr, s, t, K, p);
    for (int k = 0; k < tr.grid.size(); ++k) {
      if (tr.grid.is_boundary(k)) continue;
      const Point<n> x = tr.grid.point(k);
      w.cell(name).cell(s).cell(t).cell(k);
      for (int a = 0; a < n; ++a) w.cell(x[a]);
      w.cell(lhs[k]).cell(rhs[k]).cell(rhs[k] - lhs[k]).end();
    }
  }
  return out;
}

template std::string gradient_residuals_csv<1>(const NormField<1>&, const FlowTrace<1>&,
                                               const std::vector<std::pair<double, double>>&, double, GradientNorm);
template std::string gradient_residuals_csv<2>(const NormField<2>&, const FlowTrace<2>&,
                                               const std::vector<std::pair<double, double>>&, double, GradientNorm);

}  // namespace finsler

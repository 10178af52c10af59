#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "finsler/checks.hpp"
#include "finsler/gaussian.hpp"
#include "finsler/models.hpp"

using namespace finsler;

namespace {

using P1 = Point<1>;
using P2 = Point<2>;
constexpr double kPi = std::numbers::pi;

template <int n>
std::vector<Point<n>> random_points(const Chart<n>& c, int count, unsigned seed) {
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

ScalarField<1> sin1() {
  ScalarField<1> u;
  u.add_mode(1.0, P1(1.0));
  return u;
}

ScalarField<2> torus_test_function() {
  ScalarField<2> u;
  u.add_mode(1.0, P2(1, 0));
  u.add_mode(0.5, P2(0, 1), kPi / 2);
  return u;
}

double bump(double x, double a) {
  const double r = x / a;
  return std::abs(r) < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0;
}

}  // namespace

TEST(CheckReport, Semantics) {
  CheckReport ineq("a", CheckKind::inequality, 0.1);
  EXPECT_FALSE(ineq.pass);
  ineq.add(0.5);
  ineq.add(-0.05, [] { return std::string("here"); });
  EXPECT_TRUE(ineq.pass);
  EXPECT_EQ(ineq.witness, "here");
  ineq.add(-0.2);
  EXPECT_FALSE(ineq.pass);
  EXPECT_EQ(ineq.samples, 3);

  CheckReport id("b", CheckKind::identity, 1e-3);
  id.add(-5e-4);
  EXPECT_TRUE(id.pass);
  EXPECT_DOUBLE_EQ(id.worst, 5e-4);
  id.add(std::nan(""));
  EXPECT_FALSE(id.pass);

  const auto csv = reports_csv({ineq, id});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,samples,residual,tolerance,pass");
  EXPECT_NE(reports_summary({ineq}).find("FAIL"), std::string::npos);
  EXPECT_FALSE(all_pass({}));
}

TEST(Bochner, FlatEqualityCase) {
  // Hess u = identity: |Hess|^2 = n = (Delta u)^2/n.
  NormField<2> E;
  ScalarField<2> u;
  u.quad = Mat<double, 2>::Identity();
  const auto r = check_bochner(E, u, 0.0, 2.0, random_points(E.chart, 50, 1));
  EXPECT_LE(std::abs(r.worst), 1e-8);
  EXPECT_GE(r.samples, 49);
}

TEST(Bochner, GaussianLine) {
  const auto N = models::gaussian_line(1.0);
  const auto pts = random_points(N.chart, 200, 2);
  const auto r = check_bochner(N, sin1(), 1.0 - 1e-9, kInfiniteN, pts);
  EXPECT_TRUE(r.pass) << r.worst;
  EXPECT_GE(r.samples, 190);
  // Finite N: Ric_N = K - K^2 x^2/(N - 1) < K away from 0.
  EXPECT_THROW(check_bochner(N, sin1(), 1.0, 5.0, pts), CurvatureNotCertified);
  // Over-claimed K is caught by the certification.
  EXPECT_THROW(check_bochner(N, sin1(), 2.0, kInfiniteN, pts), CurvatureNotCertified);
}

TEST(Bochner, IdentityOnRandersTorus) {
  const auto N = models::randers_torus();
  const auto r = check_bochner_identity(N, torus_test_function(), random_points(N.chart, 120, 3));
  EXPECT_TRUE(r.pass) << r.worst;
  EXPECT_GE(r.samples, 100);
}

TEST(ImprovedBochner, GaussianLinearFunctionIsEquality) {
  NormField<2> G;
  G.phi = models::gaussian_potential<2>(1.0);
  const auto x1 = ScalarField<2>::coordinate(0);
  std::vector<P2> pts = random_points(Chart<2>{.kind = ChartKind::plane, .half_width = 3.0}, 30, 4);
  const auto r = check_improved_bochner(G, x1, 1.0 - 1e-9, pts);
  EXPECT_LE(std::abs(r.worst), 1e-8);
}

TEST(ImprovedBochner, RandersTorusWithCertifiedK) {
  const auto N = models::randers_torus();
  const auto u = torus_test_function();
  const auto pts = random_points(N.chart, 60, 5);
  std::vector<std::pair<P2, P2>> extra;
  for (const auto& x : pts) extra.push_back({x, gradient(N, u, x)});
  const auto cert = certify_curvature(N, kInfiniteN, 16, 16, extra);
  EXPECT_LT(cert.K, cert.sampled_min);
  const auto imp = check_improved_bochner(N, u, cert.K, pts);
  EXPECT_TRUE(imp.pass) << imp.worst;
  const auto aux = check_improved_bochner_aux(N, u, pts);
  EXPECT_TRUE(aux.pass) << aux.worst;
  // The extra term is nonnegative, so the improved residual never exceeds the plain one.
  const auto plain = check_bochner(N, u, cert.K, kInfiniteN, pts);
  EXPECT_LE(imp.worst, plain.worst + 1e-12);
}

TEST(Slack, FrozenConstantMatchesCalibration) {
  const auto c = calibrate_slack();
  EXPECT_LE(c.C, kSlackC);
  EXPECT_GE(c.C, 0.9 * kSlackC);
}

TEST(GradientEstimates, FlatCircle) {
  const auto N = models::euclidean_circle();
  const auto G = make_grid(N, {256}, true);
  const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return std::cos(x[0]); }), 1.0,
                           {.dt = 1e-3});
  for (auto [s, t] : {std::pair{0.0, 0.5}, {0.5, 1.0}}) {
    EXPECT_GE(check_l2_gradient(N, tr, s, t, 0.0).worst, -1e-6);
    EXPECT_GE(check_l1_gradient(N, tr, s, t, 0.0).worst, -1e-6);
  }
  EXPECT_EQ(check_l2_gradient(N, tr, 0.3, 0.3, 0.0).worst, 0.0);
  EXPECT_EQ(check_l1_gradient(N, tr, 0.3, 0.3, 0.0).worst, 0.0);
}

class GaussianLineFlow : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    N = new NormField<1>(models::gaussian_line(1.0));
    G = new Grid<1>(make_grid(*N, {1024}, true));
    for (auto u0 : {+[](const P1& x) { return x[0]; }, +[](const P1& x) { return std::sin(x[0]); }})
      traces.push_back(run_flow(*N, *G, sample(*G, u0), 1.0, {.dt = 1e-3}));
  }
  static void TearDownTestSuite() {
    delete N;
    delete G;
    traces.clear();
  }
  static inline NormField<1>* N = nullptr;
  static inline Grid<1>* G = nullptr;
  static inline std::vector<FlowTrace<1>> traces;
};

TEST_F(GaussianLineFlow, L2AndL1HoldWithSlack) {
  for (const auto& tr : traces)
    for (auto [s, t] : {std::pair{0.0, 0.25}, {0.0, 1.0}, {0.5, 1.0}}) {
      const auto l2 = check_l2_gradient(*N, tr, s, t, 1.0);
      const auto l1 = check_l1_gradient(*N, tr, s, t, 1.0);
      EXPECT_TRUE(l2.pass) << l2.worst << " " << l2.witness;
      EXPECT_TRUE(l1.pass) << l1.worst << " " << l1.witness;
      EXPECT_EQ(l2.samples, 1022);
    }
}

TEST_F(GaussianLineFlow, OverclaimedCurvatureFailsL1) {
  const auto l1 = check_l1_gradient(*N, traces[0], 0.0, 1.0, 2.0);
  EXPECT_FALSE(l1.pass);
  EXPECT_LT(l1.worst, -100 * l1.tolerance);
}

TEST_F(GaussianLineFlow, L1ImpliesL2ThroughJensen) {
  for (const auto& tr : traces) {
    const GridFunction Fs = nodal_dual_norm_sq(*N, *G, tr.states[0]).cwiseSqrt();
    EXPECT_TRUE(check_jensen(tr, Fs, 0.0, 1.0).pass);
  }
}

TEST_F(GaussianLineFlow, PoincareNearEquality) {
  const auto f = sample(*G, [](const P1& x) { return x[0]; });
  const auto r = check_poincare(*N, *G, f, 1.0);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.worst, 2e-3);
  EXPECT_NEAR(check_poincare(*N, *G, GridFunction::Constant(G->size(), 2.0), 1.0).worst, 0.0, 1e-12);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> N01;
  const double L = N->chart.half_width;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(8), b(8);
    for (int k = 0; k < 8; ++k) a[k] = N01(rng), b[k] = N01(rng);
    const auto g = sample(*G, [&](const P1& x) {
      double s = 0;
      for (int k = 0; k < 8; ++k)
        s += a[k] * std::sin((k + 1) * kPi * x[0] / L) + b[k] * std::cos((k + 1) * kPi * x[0] / L);
      return s;
    });
    EXPECT_TRUE(check_poincare(*N, *G, g, 1.0).pass);
  }
}

TEST_F(GaussianLineFlow, VarianceDecay) {
  const auto f = sample(*G, [](const P1& x) { return x[0]; });
  EXPECT_TRUE(check_variance_decay(traces[1], f, 1.0, 1.0).pass);
  const auto rate = check_decay_rate(traces[1], f, 1.0, 1.0);
  EXPECT_TRUE(rate.pass) << rate.note;
  EXPECT_NEAR(variance_curve(traces[1], f).rate, 2.0, 0.01);
}

TEST(Poincare, AsymmetricLine) {
  const auto N = models::asymmetric_line(1.0);
  const auto G = make_grid(N, {1024}, true);
  const auto cert = certify_curvature(N, kInfiniteN, 64, 2);
  EXPECT_NEAR(cert.sampled_min, 0.25, 1e-4);
  for (auto f : {+[](const P1& x) { return x[0]; }, +[](const P1& x) { return std::sin(2 * x[0]); }})
    EXPECT_TRUE(check_poincare(N, G, sample(G, f), cert.K).pass);
  EXPECT_THROW(check_poincare(N, make_grid(N, {64}, false), sample(G, [](const P1&) { return 1.0; }), 1.0),
               NotNormalized);
}

TEST(VarianceDecay, AsymmetricLineWithSampledSmoothness) {
  const auto N = models::asymmetric_line(1.0);
  const auto G = make_grid(N, {512}, true);
  const double S_F = smoothness_constants(N).S_F;
  EXPECT_NEAR(S_F, 4.0, 1e-9);
  const double K = certify_curvature(N, kInfiniteN, 64, 2).K;
  const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return std::sin(x[0]); }), 2.0,
                           {.dt = 1e-2});
  const auto f = sample(G, [](const P1& x) { return std::cos(x[0]) + x[0]; });
  EXPECT_TRUE(check_variance_decay(tr, f, K, S_F).pass);
  EXPECT_TRUE(check_decay_rate(tr, f, K, S_F).pass);
}

TEST(TimeDerivative, EnergyDensityIdentity) {
  const auto N = models::gaussian_line(1.0);
  const auto G = make_grid(N, {1024}, true);
  const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return std::sin(x[0]); }), 0.3,
                           {.dt = 2.5e-4});
  const auto r = check_energy_density_derivative(N, tr, 0.05);
  EXPECT_TRUE(r.pass) << r.worst << " " << r.witness;
}

TEST(KeyEstimate, CAlpha) {
  for (double K : {0.5, 1.0, 3.0})
    for (double t : {0.0, 0.3, 2.0}) EXPECT_NEAR(c_alpha(1.0 / K, t, K), 1.0 / K, 1e-15);
  EXPECT_EQ(c_alpha(0.7, 0.0, 1.0), 0.7);
  EXPECT_EQ(c_alpha(0.7, 2.0, 0.0), 4.7);
  EXPECT_NEAR(c_alpha(0.7, 0.5, 1e-9), 1.7, 1e-8);
}

TEST(KeyEstimate, GaussianBump) {
  const auto N = models::gaussian_line(1.0);
  const auto G = make_grid(N, {1024}, true);
  const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return bump(x[0], 2.0); }), 1.0,
                           {.dt = 1e-3});
  for (double alpha : {0.0, 1.0})
    for (double t : {0.1, 0.5, 1.0}) {
      const auto r = check_key_estimate(N, tr, alpha, t, 1.0, 2e-3);
      EXPECT_TRUE(r.pass) << alpha << " " << t << " " << r.worst;
    }
  const auto bad = run_flow(N, G, sample(G, [](const P1& x) { return 2.0 * bump(x[0], 2.0); }), 0.01,
                            {.dt = 1e-3});
  EXPECT_THROW(check_key_estimate(N, bad, 0.0, 0.01, 1.0, 2e-3), BadRange);
}

TEST(Characterization, GaussianLine) {
  CharacterizationConfig<1> cfg;
  const auto N = models::gaussian_line(1.0);
  cfg.u = sin1();
  cfg.points = random_points(N.chart, 50, 7);
  cfg.nodes = {512};
  cfg.dt = 1e-3;
  cfg.u0 = [](const P1& x) { return std::sin(x[0]); };
  const auto reps = characterization_suite(N, cfg);
  EXPECT_TRUE(all_pass(reps)) << reports_summary(reps);
  EXPECT_NEAR(std::stod(reps[0].note.substr(2)), 0.99, 1e-3);
}

TEST(Characterization, FlatCircle) {
  CharacterizationConfig<1> cfg;
  const auto N = models::euclidean_circle();
  cfg.u = sin1();
  cfg.points = random_points(N.chart, 30, 8);
  cfg.nodes = {256};
  cfg.dt = 1e-3;
  cfg.u0 = [](const P1& x) { return std::cos(x[0]) + 0.3 * std::sin(2 * x[0]); };
  const auto reps = characterization_suite(N, cfg);
  EXPECT_TRUE(all_pass(reps)) << reports_summary(reps);
}

TEST(Characterization, ReverseAsymmetricLineSharesK) {
  CharacterizationConfig<1> cfg;
  const auto N = models::asymmetric_line(1.0);
  cfg.u = sin1();
  cfg.points = random_points(N.chart, 40, 9);
  cfg.nodes = {512};
  cfg.dt = 1e-3;
  cfg.u0 = [](const P1& x) { return std::sin(x[0]); };
  const auto fwd = characterization_suite(N, cfg);
  const auto bwd = characterization_suite(reverse(N), cfg);
  EXPECT_TRUE(all_pass(fwd)) << reports_summary(fwd);
  EXPECT_TRUE(all_pass(bwd)) << reports_summary(bwd);
  EXPECT_EQ(fwd[0].note, bwd[0].note);
}

TEST(Gaussian, InverseAndScriptN) {
  for (double th : {1e-12, 1e-5, 0.1, 0.5, 0.77, 1 - 1e-9})
    EXPECT_NEAR(gauss_cdf(gauss_cdf_inverse(th)), th, 1e-14 * std::max(1.0, th / (1 - th)));
  EXPECT_NEAR(gauss_cdf_inverse(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(script_N(0.5), 0.3989423, 1e-7);
  EXPECT_EQ(script_N(0.0), 0.0);
  EXPECT_EQ(script_N(1.0), 0.0);
  EXPECT_THROW(script_N(1.5), OutOfRange);
  EXPECT_THROW(gauss_cdf_inverse(0.0), OutOfRange);
}

TEST(Gaussian, ScriptNSolvesItsOde) {
  // N N'' = -1, checked by a central difference of N.
  const double h = 1e-4;
  for (double th : {0.2, 0.5, 0.8}) {
    const double d2 = (script_N(th + h) - 2 * script_N(th) + script_N(th - h)) / (h * h);
    EXPECT_NEAR(d2, -1.0 / script_N(th), 1e-6 / script_N(th));
    const double d1 = (script_N(th + h) - script_N(th - h)) / (2 * h);
    EXPECT_NEAR(d1, script_N_prime(th), 1e-7);
  }
}

TEST(Gaussian, ProfileScaling) {
  for (double K : {0.25, 1.0, 4.0})
    for (double th : {0.01, 0.3, 0.5, 0.9})
      EXPECT_NEAR(gaussian_profile(K, th), std::sqrt(K) * script_N(th), 1e-10);
  EXPECT_THROW(gaussian_profile(0.0, 0.5), OutOfRange);
}

TEST(Csv, DecayAndGradientResidualSchemas) {
  const auto N = models::gaussian_line(1.0);
  const auto G = make_grid(N, {128}, true);
  const auto tr = run_flow(N, G, sample(G, [](const P1& x) { return std::sin(x[0]); }), 0.2, {.dt = 0.01});
  const auto f = sample(G, [](const P1& x) { return x[0]; });
  const auto curve = variance_curve(tr, f);
  const std::string d = decay_csv(curve, 1.0, 1.0);
  EXPECT_EQ(d.substr(0, d.find('\n')), "t,variance,bound");
  EXPECT_EQ(std::count(d.begin(), d.end(), '\n'), static_cast<long>(curve.t.size()) + 1);
  // At t = 0 the bound equals the variance.
  const std::string row0 = d.substr(d.find('\n') + 1, d.find('\n', d.find('\n') + 1) - d.find('\n') - 1);
  EXPECT_EQ(row0.substr(row0.find(',') + 1, row0.rfind(',') - row0.find(',') - 1), row0.substr(row0.rfind(',') + 1));

  const std::string r = gradient_residuals_csv(N, tr, {{0.0, 0.2}}, 1.0, GradientNorm::l1);
  EXPECT_EQ(r.substr(0, r.find('\n')), "estimate,s,t,node,x1,lhs,rhs,residual");
  EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 128 - 2 + 1);
  // The residual column reproduces the check's worst value.
  double worst = 1e300;
  size_t pos = r.find('\n') + 1;
  while (pos < r.size()) {
    const size_t end = r.find('\n', pos);
    const std::string line = r.substr(pos, end - pos);
    worst = std::min(worst, std::stod(line.substr(line.rfind(',') + 1)));
    pos = end + 1;
  }
  EXPECT_EQ(worst, check_l1_gradient(N, tr, 0.0, 0.2, 1.0).worst);
}

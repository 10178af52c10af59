#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "finsler/heat.hpp"
#include "run_config.hpp"

using namespace finsler;
using namespace finsler::lab;

namespace {

const char* kGaussianLine = R"(
dim = 1
[measure]
phi = { quad = [[-1.0]] }
[chart]
kind = "interval"
half_width = 6.0
[grid]
nodes = [1024]
[solver]
dt = 1e-3
T = 1.0
u0 = { lin = [1.0] }
)";

std::string file(const Output& out, const std::string& name) {
  for (const auto& [k, v] : out.files)
    if (k == name) return v;
  ADD_FAILURE() << "missing output " << name;
  return {};
}

// Second line of a two-line CSV, split on commas.
std::vector<double> csv_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<double> v;
  std::istringstream row(line);
  for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
  return v;
}

}  // namespace

TEST(Config, SerializeRoundTripIsStable) {
  const char* text = R"(
dim = 2
seed = "18446744073709551615"
[metric]
family = "randers"
b = [{ modes = [{ amp = 0.3, k = [0.0, 1.0] }] }, 0.1]
[measure]
phi = { c0 = 0.5, quad = [[-1.0, 0.2], [0.2, -1.0]] }
[chart]
kind = "torus"
[checks]
suites = ["bochner", "key"]
K = 0.5
key_alpha = [0.0, 2.0]
)";
  const RunConfig a = parse_config(text);
  EXPECT_EQ(a.seed, 18446744073709551615ull);
  EXPECT_EQ(a.K, 0.5);
  ASSERT_EQ(a.b.size(), 2u);
  EXPECT_EQ(a.b[1].c0, 0.1);
  const std::string s = serialize_config(a);
  const RunConfig b = parse_config(s);
  EXPECT_EQ(serialize_config(b), s);
  EXPECT_EQ(a, b);
}

TEST(Config, CertifiedKSurvivesRoundTrip) {
  const RunConfig a = parse_config(kGaussianLine);
  EXPECT_TRUE(std::isnan(a.K));
  const RunConfig b = parse_config(serialize_config(a));
  EXPECT_TRUE(std::isnan(b.K));
  EXPECT_EQ(serialize_config(b), serialize_config(a));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("dim = [1"), ConfigError);
  EXPECT_THROW(parse_config("dim = 1\n[metric]\nfamily = \"kropina\"\n"), ConfigError);
  EXPECT_THROW(parse_config("dim = 1\nbogus = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("dim = 1\n[checks]\nsuites = [\"nope\"]\n"), ConfigError);
  EXPECT_THROW(parse_config("dim = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("dim = 1\n[chart]\nkind = \"sphere\"\n"), ConfigError);
}

TEST(NormInfo, EuclideanConstantsAreOne) {
  const Output out = cmd_norm_info(parse_config("dim = 2\n"));
  EXPECT_EQ(out.code, kPass);
  const auto r = csv_row(file(out, "norm_info.csv"));
  ASSERT_EQ(r.size(), 5u);
  EXPECT_NEAR(r[0], 1.0, 1e-9);
  EXPECT_NEAR(r[1], 1.0, 1e-9);
  EXPECT_NEAR(r[2], 1.0, 1e-9);
}

TEST(NormInfo, RandersReversibility) {
  // F(v) = |v| + v/2: F(1) = 3/2, F(-1) = 1/2.
  const Output out = cmd_norm_info(parse_config("dim = 1\n[metric]\nfamily = \"randers\"\nb = [0.5]\n"));
  EXPECT_EQ(out.code, kPass);
  const auto r = csv_row(file(out, "norm_info.csv"));
  EXPECT_NEAR(r[2], 3.0, 1e-6);
  EXPECT_LE(r[2], r[3] + 1e-9);
}

TEST(Heat, ConstantInitialDataStaysConstant) {
  RunConfig cfg = parse_config("dim = 1\n[chart]\nkind = \"torus\"\n[grid]\nnodes = [64]\n");
  cfg.u0.c0 = 2.0;
  cfg.T = 0.05;
  const Output out = cmd_heat(cfg);
  EXPECT_EQ(out.code, kPass);
  std::istringstream in(file(out, "trace.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_NEAR(std::stod(line.substr(line.rfind(',') + 1)), 2.0, 1e-14) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 64 * 51);
}

TEST(Heat, GateFailsOnMassDrift) {
  const RunConfig cfg = parse_config("dim = 1\n[chart]\nkind = \"torus\"\n[grid]\nnodes = [32]\n");
  const auto N = build_norm<1>(cfg);
  const auto G = make_grid<1>(N, {32}, true);
  GridFunction u0(32);
  for (int i = 0; i < 32; ++i) u0[i] = std::sin(G.point(i)[0]);
  auto tr = run_flow<1>(N, G, u0, 0.01);
  std::string why;
  EXPECT_EQ(heat_gate(tr, &why), kPass);
  tr.masses.back() += 1e-9;
  EXPECT_EQ(heat_gate(tr, &why), kCheckFailed);
  EXPECT_NE(why.find("mass drift"), std::string::npos);
  tr.masses.back() -= 1e-9;
  tr.energies.back() = tr.energies.front() + 1.0;
  EXPECT_EQ(heat_gate(tr, &why), kCheckFailed);
}

TEST(Verify, GaussianLineCertifiedPasses) {
  RunConfig cfg = parse_config(kGaussianLine);
  cfg.suites = {"l2", "l1"};
  const Output out = cmd_verify(cfg);
  EXPECT_EQ(out.code, kPass) << out.text;
}

TEST(Verify, OverclaimedCurvatureFailsL1) {
  RunConfig cfg = parse_config(kGaussianLine);
  cfg.suites = {"l1"};
  cfg.K = 2.0;
  const Output out = cmd_verify(cfg);
  EXPECT_EQ(out.code, kCheckFailed);
  EXPECT_NE(out.text.find("FAIL l1_gradient"), std::string::npos);
}

TEST(Verify, EmitsPlotInputs) {
  RunConfig cfg = parse_config(kGaussianLine);
  cfg.suites = {"l1", "variance"};
  cfg.T = 0.2;
  EXPECT_EQ(cmd_verify(cfg).code, kUsage);  // default windows reach past T
  cfg.windows = {0.0, 0.2};
  const Output out = cmd_verify(cfg);
  EXPECT_EQ(out.code, kPass) << out.text;
  const std::string r = file(out, "l1_residuals.csv"), d = file(out, "decay.csv");
  EXPECT_EQ(r.substr(0, r.find('\n')), "estimate,s,t,node,x1,lhs,rhs,residual");
  EXPECT_EQ(d.substr(0, d.find('\n')), "t,variance,bound");
}

TEST(Verify, EmptySuiteListIsUsageError) {
  const Output out = cmd_verify(parse_config(kGaussianLine));
  EXPECT_EQ(out.code, kUsage);
}

TEST(Verify, SameSeedSameArtifacts) {
  RunConfig cfg = parse_config(kGaussianLine);
  cfg.suites = {"poincare", "bochner"};
  cfg.seed = 7;
  const Output a = cmd_verify(cfg);
  const Output b = cmd_verify(cfg);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i], b.files[i]);
  cfg.seed = 8;
  EXPECT_NE(file(cmd_verify(cfg), "verify.csv"), file(a, "verify.csv"));
}

#pragma once

// Run configuration of finsler-lab, read from and written to TOML.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "finsler/norm_field.hpp"

namespace finsler::lab {

/// Dimension-free form of ScalarExpr: c0 + lin.x + x^T quad x / 2 + sum amp sin(k.x + phase).
struct ExprSpec {
  struct Mode {
    double amp = 0.0;
    std::vector<double> k;
    double phase = 0.0;
    bool operator==(const Mode&) const = default;
  };
  double c0 = 0.0;
  std::vector<double> lin;                 // empty = 0
  std::vector<std::vector<double>> quad;   // empty = 0
  std::vector<Mode> modes;

  bool operator==(const ExprSpec&) const = default;
};

inline constexpr double kCertified = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
  int dim = 1;
  std::uint64_t seed = 1;
  std::string out = "out";

  // [metric]
  std::string family = "riemannian";
  std::vector<std::vector<double>> a0;  // empty = identity
  std::vector<ExprSpec> b;              // one per axis, empty = no drift
  ExprSpec lambda;
  double p = 4.0;
  double eps = 0.1;

  // [measure]
  ExprSpec phi;

  // [chart]
  std::string chart = "plane";
  double half_width = 1.0;
  std::vector<double> periods;  // empty = 2 pi on each axis

  // [grid]
  std::vector<int> nodes;

  // [solver]
  double dt = 1e-3;
  double T = 1.0;
  std::string linear = "direct";
  ExprSpec u0;
  double u0_bump = 0.0;  // > 0: u0 = exp(1 - 1/(1 - |x/a|^2)) with radius a instead
  int stride = 1;  // trace rows every stride steps

  // [checks]
  std::vector<std::string> suites;
  double K = kCertified;  // NaN: use the certified bound
  double Nparam = std::numeric_limits<double>::infinity();
  ExprSpec u;             // pointwise test function
  int points = 120;
  int chart_points = 32;
  int directions = 16;
  std::vector<double> windows = {0.0, 0.5, 0.0, 1.0, 0.5, 1.0};  // (s, t) pairs
  double slack_C = 0.02;
  double tol_identity = 1e-4;
  double tol_bochner = 1e-5;
  double tol_aux = 1e-8;
  double tol_poincare = 1e-12;
  int poincare_random = 20;
  double variance_eps = 5e-2;
  double decay_margin = 5e-2;
  std::vector<double> key_alpha = {0.0, 1.0};
  std::vector<double> key_times = {0.1, 0.5, 1.0};
  double tol_key = 2e-3;

  // [isoperimetry]
  std::vector<double> thetas;  // empty = 0.05, 0.10, ..., 0.95
  int half_plane_directions = 8;
  double tol_bakry_ledoux = 1e-6;

  // [geodesic]
  std::vector<double> x0, v0;
  double geodesic_T = 1.0;
  double geodesic_dt = 1e-3;

  // [norm]
  int norm_chart_points = 64;
  int norm_directions = 256;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError (or toml::parse_error) on malformed input, unknown keys,
/// unknown families, charts or suites, and arrays of the wrong length.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

extern const std::vector<std::string> kSuites;

template <int n>
ScalarExpr<n> build_expr(const ExprSpec& e);
template <int n>
NormField<n> build_norm(const RunConfig& cfg);

}  // namespace finsler::lab

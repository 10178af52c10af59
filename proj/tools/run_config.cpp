#include "run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_HEADER_ONLY 1
#include "toml.hpp"

namespace finsler::lab {

const std::vector<std::string> kSuites = {"bochner", "improved", "l2",  "l1",          "poincare",
                                          "variance", "key",      "char", "isoperimetry"};

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void allow_keys(const toml::table& t, const std::string& where, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto&& [k, v] : t)
    if (!ok.count(std::string(k.str()))) fail(where, "unknown key '" + std::string(k.str()) + "'");
}

double to_double(const toml::node& v, const std::string& where) {
  if (auto d = v.value_exact<double>()) return *d;
  if (auto i = v.value_exact<int64_t>()) return static_cast<double>(*i);
  fail(where, "expected a number");
}

int to_int(const toml::node& v, const std::string& where) {
  if (auto i = v.value_exact<int64_t>()) return static_cast<int>(*i);
  fail(where, "expected an integer");
}

std::string to_string_value(const toml::node& v, const std::string& where) {
  if (auto s = v.value_exact<std::string>()) return *s;
  fail(where, "expected a string");
}

const toml::array& to_array(const toml::node& v, const std::string& where) {
  if (auto a = v.as_array()) return *a;
  fail(where, "expected an array");
}

const toml::table& to_table(const toml::node& v, const std::string& where) {
  if (auto t = v.as_table()) return *t;
  fail(where, "expected a table");
}

std::vector<double> doubles(const toml::node& v, const std::string& where) {
  std::vector<double> r;
  for (auto&& x : to_array(v, where)) r.push_back(to_double(x, where));
  return r;
}

std::vector<int> ints(const toml::node& v, const std::string& where) {
  std::vector<int> r;
  for (auto&& x : to_array(v, where)) r.push_back(to_int(x, where));
  return r;
}

std::vector<std::vector<double>> matrix(const toml::node& v, const std::string& where) {
  std::vector<std::vector<double>> r;
  for (auto&& row : to_array(v, where)) r.push_back(doubles(row, where));
  return r;
}

ExprSpec expr(const toml::node& v, const std::string& where) {
  const auto& t = to_table(v, where);
  allow_keys(t, where, {"c0", "lin", "quad", "modes"});
  ExprSpec e;
  if (auto x = t.get("c0")) e.c0 = to_double(*x, where + ".c0");
  if (auto x = t.get("lin")) e.lin = doubles(*x, where + ".lin");
  if (auto x = t.get("quad")) e.quad = matrix(*x, where + ".quad");
  if (auto x = t.get("modes"))
    for (auto&& m : to_array(*x, where + ".modes")) {
      const auto& mt = to_table(m, where + ".modes");
      allow_keys(mt, where + ".modes", {"amp", "k", "phase"});
      ExprSpec::Mode mode;
      if (auto y = mt.get("amp")) mode.amp = to_double(*y, where + ".modes.amp");
      if (auto y = mt.get("k")) mode.k = doubles(*y, where + ".modes.k");
      if (auto y = mt.get("phase")) mode.phase = to_double(*y, where + ".modes.phase");
      e.modes.push_back(mode);
    }
  return e;
}

template <class T, class Fn>
void read(const toml::table& t, const char* key, T& into, Fn&& conv, const std::string& where) {
  if (auto x = t.get(key)) into = conv(*x, where + "." + key);
}

const toml::table* section(const toml::table& root, const char* name) {
  if (auto x = root.get(name)) return &to_table(*x, name);
  return nullptr;
}

void check_vector(const std::vector<double>& v, int dim, const std::string& where, bool allow_empty) {
  if (v.empty() && allow_empty) return;
  if (static_cast<int>(v.size()) != dim) fail(where, "expected " + std::to_string(dim) + " entries");
}

void check_matrix(const std::vector<std::vector<double>>& m, int dim, const std::string& where) {
  if (m.empty()) return;
  if (static_cast<int>(m.size()) != dim) fail(where, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  for (const auto& row : m) check_vector(row, dim, where, false);
}

void check_expr(const ExprSpec& e, int dim, const std::string& where) {
  check_vector(e.lin, dim, where + ".lin", true);
  check_matrix(e.quad, dim, where + ".quad");
  for (const auto& m : e.modes) check_vector(m.k, dim, where + ".modes.k", false);
}

void validate(const RunConfig& c) {
  if (c.dim != 1 && c.dim != 2) fail("dim", "must be 1 or 2");
  family_from_string(c.family);
  chart_from_string(c.chart);
  check_matrix(c.a0, c.dim, "metric.a0");
  if (!c.b.empty() && static_cast<int>(c.b.size()) != c.dim) fail("metric.b", "expected one entry per axis");
  for (const auto& e : c.b) check_expr(e, c.dim, "metric.b");
  check_expr(c.lambda, c.dim, "metric.lambda");
  check_expr(c.phi, c.dim, "measure.phi");
  check_expr(c.u0, c.dim, "solver.u0");
  check_expr(c.u, c.dim, "checks.u");
  check_vector(c.periods, c.dim, "chart.periods", true);
  if (!c.nodes.empty() && static_cast<int>(c.nodes.size()) != c.dim) fail("grid.nodes", "expected one entry per axis");
  for (int k : c.nodes)
    if (k < 4) fail("grid.nodes", "need at least 4 nodes per axis");
  check_vector(c.x0, c.dim, "geodesic.x0", true);
  check_vector(c.v0, c.dim, "geodesic.v0", true);
  if (!(c.dt > 0.0) || !(c.T > 0.0)) fail("solver", "dt and T must be positive");
  if (c.linear != "direct" && c.linear != "cg") fail("solver.linear", "must be 'direct' or 'cg'");
  if (c.stride < 1) fail("solver.stride", "must be >= 1");
  if (c.windows.size() % 2 != 0) fail("checks.windows", "expected (s, t) pairs");
  for (const auto& s : c.suites)
    if (std::find(kSuites.begin(), kSuites.end(), s) == kSuites.end()) fail("checks.suites", "unknown suite '" + s + "'");
  for (double th : c.thetas)
    if (!(th >= 0.0 && th <= 1.0)) fail("isoperimetry.thetas", "must lie in [0, 1]");
}

// Serialization helpers.

toml::array arr(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

toml::array arr(const std::vector<int>& v) {
  toml::array a;
  for (int x : v) a.push_back(static_cast<int64_t>(x));
  return a;
}

toml::array arr(const std::vector<std::string>& v) {
  toml::array a;
  for (const auto& x : v) a.push_back(x);
  return a;
}

toml::array arr(const std::vector<std::vector<double>>& m) {
  toml::array a;
  for (const auto& row : m) a.push_back(arr(row));
  return a;
}

toml::table expr_table(const ExprSpec& e) {
  toml::table t;
  t.insert("c0", e.c0);
  t.insert("lin", arr(e.lin));
  t.insert("quad", arr(e.quad));
  toml::array modes;
  for (const auto& m : e.modes) {
    toml::table mt;
    mt.insert("amp", m.amp);
    mt.insert("k", arr(m.k));
    mt.insert("phase", m.phase);
    modes.push_back(std::move(mt));
  }
  t.insert("modes", std::move(modes));
  return t;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("TOML: " + os.str());
  }
  allow_keys(root, "config",
             {"dim", "seed", "out", "metric", "measure", "chart", "grid", "solver", "checks", "isoperimetry",
              "geodesic", "norm"});
  RunConfig c;
  read(root, "dim", c.dim, to_int, "");
  if (auto x = root.get("seed")) {
    if (auto i = x->value_exact<int64_t>()) {
      if (*i < 0) fail("seed", "must be nonnegative");
      c.seed = static_cast<std::uint64_t>(*i);
    } else if (auto s = x->value_exact<std::string>()) {
      try {
        size_t used = 0;
        c.seed = std::stoull(*s, &used);
        if (used != s->size()) throw std::invalid_argument("seed");
      } catch (const std::exception&) {
        fail("seed", "expected an unsigned integer");
      }
    } else {
      fail("seed", "expected an unsigned integer");
    }
  }
  read(root, "out", c.out, to_string_value, "");

  if (auto t = section(root, "metric")) {
    allow_keys(*t, "metric", {"family", "a0", "b", "lambda", "p", "eps"});
    read(*t, "family", c.family, to_string_value, "metric");
    read(*t, "a0", c.a0, matrix, "metric");
    if (auto x = t->get("b"))
      for (auto&& e : to_array(*x, "metric.b")) {
        if (e.is_table())
          c.b.push_back(expr(e, "metric.b"));
        else
          c.b.push_back(ExprSpec{to_double(e, "metric.b"), {}, {}, {}});
      }
    read(*t, "lambda", c.lambda, expr, "metric");
    read(*t, "p", c.p, to_double, "metric");
    read(*t, "eps", c.eps, to_double, "metric");
  }
  if (auto t = section(root, "measure")) {
    allow_keys(*t, "measure", {"phi"});
    read(*t, "phi", c.phi, expr, "measure");
  }
  if (auto t = section(root, "chart")) {
    allow_keys(*t, "chart", {"kind", "half_width", "periods"});
    read(*t, "kind", c.chart, to_string_value, "chart");
    read(*t, "half_width", c.half_width, to_double, "chart");
    read(*t, "periods", c.periods, doubles, "chart");
  }
  if (auto t = section(root, "grid")) {
    allow_keys(*t, "grid", {"nodes"});
    read(*t, "nodes", c.nodes, ints, "grid");
  }
  if (auto t = section(root, "solver")) {
    allow_keys(*t, "solver", {"dt", "T", "linear", "u0", "u0_bump", "stride"});
    read(*t, "dt", c.dt, to_double, "solver");
    read(*t, "T", c.T, to_double, "solver");
    read(*t, "linear", c.linear, to_string_value, "solver");
    read(*t, "u0", c.u0, expr, "solver");
    read(*t, "u0_bump", c.u0_bump, to_double, "solver");
    read(*t, "stride", c.stride, to_int, "solver");
  }
  if (auto t = section(root, "checks")) {
    allow_keys(*t, "checks",
               {"suites", "K", "N", "u", "points", "chart_points", "directions", "windows", "slack_C",
                "tol_identity", "tol_bochner", "tol_aux", "tol_poincare", "poincare_random", "variance_eps",
                "decay_margin", "key_alpha", "key_times", "tol_key"});
    if (auto x = t->get("suites"))
      for (auto&& s : to_array(*x, "checks.suites")) c.suites.push_back(to_string_value(s, "checks.suites"));
    if (auto x = t->get("K")) {
      if (auto s = x->value_exact<std::string>()) {
        if (*s != "certified") fail("checks.K", "expected a number or 'certified'");
      } else {
        c.K = to_double(*x, "checks.K");
      }
    }
    read(*t, "N", c.Nparam, to_double, "checks");
    read(*t, "u", c.u, expr, "checks");
    read(*t, "points", c.points, to_int, "checks");
    read(*t, "chart_points", c.chart_points, to_int, "checks");
    read(*t, "directions", c.directions, to_int, "checks");
    read(*t, "windows", c.windows, doubles, "checks");
    read(*t, "slack_C", c.slack_C, to_double, "checks");
    read(*t, "tol_identity", c.tol_identity, to_double, "checks");
    read(*t, "tol_bochner", c.tol_bochner, to_double, "checks");
    read(*t, "tol_aux", c.tol_aux, to_double, "checks");
    read(*t, "tol_poincare", c.tol_poincare, to_double, "checks");
    read(*t, "poincare_random", c.poincare_random, to_int, "checks");
    read(*t, "variance_eps", c.variance_eps, to_double, "checks");
    read(*t, "decay_margin", c.decay_margin, to_double, "checks");
    read(*t, "key_alpha", c.key_alpha, doubles, "checks");
    read(*t, "key_times", c.key_times, doubles, "checks");
    read(*t, "tol_key", c.tol_key, to_double, "checks");
  }
  if (auto t = section(root, "isoperimetry")) {
    allow_keys(*t, "isoperimetry", {"thetas", "directions", "tol"});
    read(*t, "thetas", c.thetas, doubles, "isoperimetry");
    read(*t, "directions", c.half_plane_directions, to_int, "isoperimetry");
    read(*t, "tol", c.tol_bakry_ledoux, to_double, "isoperimetry");
  }
  if (auto t = section(root, "geodesic")) {
    allow_keys(*t, "geodesic", {"x0", "v0", "T", "dt"});
    read(*t, "x0", c.x0, doubles, "geodesic");
    read(*t, "v0", c.v0, doubles, "geodesic");
    read(*t, "T", c.geodesic_T, to_double, "geodesic");
    read(*t, "dt", c.geodesic_dt, to_double, "geodesic");
  }
  if (auto t = section(root, "norm")) {
    allow_keys(*t, "norm", {"chart_points", "directions"});
    read(*t, "chart_points", c.norm_chart_points, to_int, "norm");
    read(*t, "directions", c.norm_directions, to_int, "norm");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  toml::table root;
  root.insert("dim", static_cast<int64_t>(c.dim));
  if (c.seed <= static_cast<std::uint64_t>(std::numeric_limits<int64_t>::max()))
    root.insert("seed", static_cast<int64_t>(c.seed));
  else
    root.insert("seed", std::to_string(c.seed));
  root.insert("out", c.out);

  toml::table metric;
  metric.insert("family", c.family);
  metric.insert("a0", arr(c.a0));
  toml::array b;
  for (const auto& e : c.b) b.push_back(expr_table(e));
  metric.insert("b", std::move(b));
  metric.insert("lambda", expr_table(c.lambda));
  metric.insert("p", c.p);
  metric.insert("eps", c.eps);
  root.insert("metric", std::move(metric));

  root.insert("measure", toml::table{{"phi", expr_table(c.phi)}});

  toml::table chart;
  chart.insert("kind", c.chart);
  chart.insert("half_width", c.half_width);
  chart.insert("periods", arr(c.periods));
  root.insert("chart", std::move(chart));

  root.insert("grid", toml::table{{"nodes", arr(c.nodes)}});

  toml::table solver;
  solver.insert("dt", c.dt);
  solver.insert("T", c.T);
  solver.insert("linear", c.linear);
  solver.insert("u0", expr_table(c.u0));
  solver.insert("u0_bump", c.u0_bump);
  solver.insert("stride", static_cast<int64_t>(c.stride));
  root.insert("solver", std::move(solver));

  toml::table checks;
  checks.insert("suites", arr(c.suites));
  if (std::isnan(c.K))
    checks.insert("K", "certified");
  else
    checks.insert("K", c.K);
  checks.insert("N", c.Nparam);
  checks.insert("u", expr_table(c.u));
  checks.insert("points", static_cast<int64_t>(c.points));
  checks.insert("chart_points", static_cast<int64_t>(c.chart_points));
  checks.insert("directions", static_cast<int64_t>(c.directions));
  checks.insert("windows", arr(c.windows));
  checks.insert("slack_C", c.slack_C);
  checks.insert("tol_identity", c.tol_identity);
  checks.insert("tol_bochner", c.tol_bochner);
  checks.insert("tol_aux", c.tol_aux);
  checks.insert("tol_poincare", c.tol_poincare);
  checks.insert("poincare_random", static_cast<int64_t>(c.poincare_random));
  checks.insert("variance_eps", c.variance_eps);
  checks.insert("decay_margin", c.decay_margin);
  checks.insert("key_alpha", arr(c.key_alpha));
  checks.insert("key_times", arr(c.key_times));
  checks.insert("tol_key", c.tol_key);
  root.insert("checks", std::move(checks));

  toml::table iso;
  iso.insert("thetas", arr(c.thetas));
  iso.insert("directions", static_cast<int64_t>(c.half_plane_directions));
  iso.insert("tol", c.tol_bakry_ledoux);
  root.insert("isoperimetry", std::move(iso));

  toml::table geo;
  geo.insert("x0", arr(c.x0));
  geo.insert("v0", arr(c.v0));
  geo.insert("T", c.geodesic_T);
  geo.insert("dt", c.geodesic_dt);
  root.insert("geodesic", std::move(geo));

  toml::table norm;
  norm.insert("chart_points", static_cast<int64_t>(c.norm_chart_points));
  norm.insert("directions", static_cast<int64_t>(c.norm_directions));
  root.insert("norm", std::move(norm));

  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

template <int n>
ScalarExpr<n> build_expr(const ExprSpec& e) {
  ScalarExpr<n> r;
  r.c0 = e.c0;
  for (int i = 0; i < static_cast<int>(e.lin.size()); ++i) r.lin[i] = e.lin[i];
  for (int i = 0; i < static_cast<int>(e.quad.size()); ++i)
    for (int j = 0; j < n; ++j) r.quad(i, j) = e.quad[i][j];
  for (const auto& m : e.modes) {
    Point<n> k;
    for (int i = 0; i < n; ++i) k[i] = m.k[i];
    r.add_mode(m.amp, k, m.phase);
  }
  return r;
}

template <int n>
NormField<n> build_norm(const RunConfig& c) {
  if (c.dim != n) throw ConfigError("dimension mismatch");
  NormField<n> N;
  N.family = family_from_string(c.family);
  for (int i = 0; i < static_cast<int>(c.a0.size()); ++i)
    for (int j = 0; j < n; ++j) N.a0(i, j) = c.a0[i][j];
  for (int i = 0; i < static_cast<int>(c.b.size()); ++i) N.b[i] = build_expr<n>(c.b[i]);
  N.lambda = build_expr<n>(c.lambda);
  N.p = c.p;
  N.eps = c.eps;
  N.phi = build_expr<n>(c.phi);
  N.chart.kind = chart_from_string(c.chart);
  N.chart.half_width = c.half_width;
  for (int i = 0; i < static_cast<int>(c.periods.size()); ++i) N.chart.periods[i] = c.periods[i];
  try {
    N.validate();
  } catch (const InvalidNorm& e) {
    throw ConfigError(std::string("metric: ") + e.what());
  }
  return N;
}

template ScalarExpr<1> build_expr<1>(const ExprSpec&);
template ScalarExpr<2> build_expr<2>(const ExprSpec&);
template NormField<1> build_norm<1>(const RunConfig&);
template NormField<2> build_norm<2>(const RunConfig&);

}  // namespace finsler::lab

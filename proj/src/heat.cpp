#include "finsler/heat.hpp"

#include <cmath>

#include "finsler/csv.hpp"

namespace finsler {

template <int n>
int Grid<n>::size() const {
  int s = 1;
  for (int a = 0; a < n; ++a) s *= nodes[a];
  return s;
}

template <int n>
std::array<int, n> Grid<n>::multi_index(int k) const {
  std::array<int, n> m{};
  for (int a = 0; a < n; ++a) {
    m[a] = k % nodes[a];
    k /= nodes[a];
  }
  return m;
}

template <int n>
int Grid<n>::index(const std::array<int, n>& m) const {
  int k = 0;
  for (int a = n - 1; a >= 0; --a) {
    int i = m[a];
    if (topology == Topology::periodic) i = ((i % nodes[a]) + nodes[a]) % nodes[a];
    k = k * nodes[a] + i;
  }
  return k;
}

template <int n>
Point<n> Grid<n>::point(int k) const {
  const auto m = multi_index(k);
  Point<n> x;
  for (int a = 0; a < n; ++a) x[a] = lo[a] + m[a] * h[a];
  return x;
}

template <int n>
bool Grid<n>::is_boundary(int k) const {
  if (topology == Topology::periodic) return false;
  const auto m = multi_index(k);
  for (int a = 0; a < n; ++a)
    if (m[a] == 0 || m[a] == nodes[a] - 1) return true;
  return false;
}

template <int n>
Grid<n> make_grid(const NormField<n>& N, const std::array<int, n>& nodes, bool normalize) {
  Grid<n> G;
  G.nodes = nodes;
  for (int a = 0; a < n; ++a)
    if (nodes[a] < 3) throw ConfigError("grid needs at least 3 nodes per axis");
  switch (N.chart.kind) {
    case ChartKind::torus:
      G.topology = Topology::periodic;
      for (int a = 0; a < n; ++a) {
        G.h[a] = N.chart.periods[a] / nodes[a];
        G.lo[a] = 0.0;
      }
      break;
    case ChartKind::interval:
      G.topology = Topology::zero_flux;
      for (int a = 0; a < n; ++a) {
        G.h[a] = 2.0 * N.chart.half_width / nodes[a];
        G.lo[a] = -N.chart.half_width + 0.5 * G.h[a];
      }
      break;
    case ChartKind::plane:
      throw ConfigError("heat grids need a torus or interval chart");
  }
  double vol = 1.0;
  for (int a = 0; a < n; ++a) vol *= G.h[a];

  const int size = G.size();
  G.w.resize(size);
  for (int k = 0; k < size; ++k) G.w[k] = std::exp(N.phi(G.point(k))) * vol;
  const double scale = normalize ? 1.0 / G.w.sum() : 1.0;
  G.w *= scale;

  std::array<int, n> lim{};
  for (int a = 0; a < n; ++a)
    lim[a] = G.topology == Topology::periodic ? nodes[a] : nodes[a] - 1;
  int count = 1;
  for (int a = 0; a < n; ++a) count *= lim[a];
  G.cells.reserve(count);
  for (int c = 0; c < count; ++c) {
    std::array<int, n> m{};
    int r = c;
    for (int a = 0; a < n; ++a) {
      m[a] = r % lim[a];
      r /= lim[a];
    }
    Cell<n> cell;
    for (int corner = 0; corner < Cell<n>::kCorners; ++corner) {
      auto mm = m;
      for (int a = 0; a < n; ++a) mm[a] += (corner >> a) & 1;
      cell.corner[corner] = G.index(mm);
    }
    for (int a = 0; a < n; ++a) cell.center[a] = G.lo[a] + (m[a] + 0.5) * G.h[a];
    cell.w = std::exp(N.phi(cell.center)) * vol * scale;
    G.cells.push_back(cell);
  }
  return G;
}

template <int n>
std::vector<Point<n>> cell_differentials(const Grid<n>& G, const GridFunction& u) {
  std::vector<Point<n>> out(G.cells.size());
  for (size_t c = 0; c < G.cells.size(); ++c) {
    const auto& k = G.cells[c].corner;
    if constexpr (n == 1) {
      out[c][0] = (u[k[1]] - u[k[0]]) / G.h[0];
    } else {
      out[c][0] = (u[k[1]] - u[k[0]] + u[k[3]] - u[k[2]]) / (2.0 * G.h[0]);
      out[c][1] = (u[k[2]] - u[k[0]] + u[k[3]] - u[k[1]]) / (2.0 * G.h[1]);
    }
  }
  return out;
}

template <int n>
std::vector<Point<n>> nodal_differentials(const Grid<n>& G, const GridFunction& u) {
  std::vector<Point<n>> out(G.size());
  for (int k = 0; k < G.size(); ++k) {
    const auto m = G.multi_index(k);
    for (int a = 0; a < n; ++a) {
      auto mp = m, mm = m;
      ++mp[a];
      --mm[a];
      double den = 2.0 * G.h[a];
      if (G.topology == Topology::zero_flux) {
        if (m[a] == 0) mm = m, den = G.h[a];
        if (m[a] == G.nodes[a] - 1) mp = m, den = G.h[a];
      }
      out[k][a] = (u[G.index(mp)] - u[G.index(mm)]) / den;
    }
  }
  return out;
}

template <int n>
GridFunction nodal_dual_norm_sq(const NormField<n>& N, const Grid<n>& G, const GridFunction& u) {
  const auto D = nodal_differentials(G, u);
  GridFunction r(G.size());
  for (int k = 0; k < G.size(); ++k) {
    const double f = dual_norm(N, G.point(k), D[k]);
    r[k] = f * f;
  }
  return r;
}

namespace {

template <int n>
Mat<double, n> frozen_coefficient(const NormField<n>& N, const Point<n>& x, const Point<n>& Du,
                                  const FlowOptions<n>& opt, bool& fell_back) {
  fell_back = is_zero_vector(Du);
  if (N.family == Family::riemannian)
    return N.a0.inverse() * std::exp(-2.0 * N.lambda(x));
  Point<n> V;
  if (fell_back)
    V = opt.fallback / N.F(x, opt.fallback);
  else
    V = legendre(N, x, Du);
  return vertical<n, double>(N, x, V).g.inverse();
}

}  // namespace

template <int n>
FrozenDiffusion<n> frozen_diffusion(const NormField<n>& N, const Grid<n>& G, const GridFunction& u,
                                    const FlowOptions<n>& opt) {
  FrozenDiffusion<n> fd;
  const auto Du = cell_differentials(G, u);
  const size_t nc = G.cells.size();
  fd.C.resize(nc);
  fd.fallback.resize(nc);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nc * (n == 1 ? 4 : 24));
  auto edge = [&](int a, int b, double kappa, double w) {
    const double s = w * kappa;
    if (kappa < 0.0) fd.monotone = false;
    trip.emplace_back(a, a, s);
    trip.emplace_back(b, b, s);
    trip.emplace_back(a, b, -s);
    trip.emplace_back(b, a, -s);
  };
  for (size_t c = 0; c < nc; ++c) {
    const auto& cell = G.cells[c];
    bool fb = false;
    fd.C[c] = frozen_coefficient(N, cell.center, Du[c], opt, fb);
    fd.fallback[c] = fb;
    const auto& k = cell.corner;
    if constexpr (n == 1) {
      edge(k[0], k[1], fd.C[c](0, 0) / (G.h[0] * G.h[0]), cell.w);
    } else {
      const double h1 = G.h[0], h2 = G.h[1];
      const double c11 = fd.C[c](0, 0), c22 = fd.C[c](1, 1);
      const double c12 = 0.5 * (fd.C[c](0, 1) + fd.C[c](1, 0));
      const double mu3 = std::max(c12, 0.0) / (h1 * h2);
      const double mu4 = std::max(-c12, 0.0) / (h1 * h2);
      const double mu1 = c11 - std::abs(c12) * h1 / h2;
      const double mu2 = c22 - std::abs(c12) * h2 / h1;
      edge(k[0], k[1], mu1 / (2 * h1 * h1), cell.w);
      edge(k[2], k[3], mu1 / (2 * h1 * h1), cell.w);
      edge(k[0], k[2], mu2 / (2 * h2 * h2), cell.w);
      edge(k[1], k[3], mu2 / (2 * h2 * h2), cell.w);
      edge(k[0], k[3], mu3, cell.w);
      edge(k[1], k[2], mu4, cell.w);
    }
  }
  fd.S.resize(G.size(), G.size());
  fd.S.setFromTriplets(trip.begin(), trip.end());
  return fd;
}

StepOperator::StepOperator(Eigen::SparseMatrix<double> M, LinearSolver solver, double tol,
                           int max_iter)
    : M_(std::move(M)), kind_(solver) {
  if (kind_ == LinearSolver::direct) {
    ldlt_.compute(M_);
    if (ldlt_.info() != Eigen::Success) throw SolverDiverged("sparse LDLT failed");
  } else {
    cg_.setTolerance(tol);
    cg_.setMaxIterations(max_iter);
    cg_.compute(M_);
    if (cg_.info() != Eigen::Success) throw SolverDiverged("CG setup failed");
  }
}

GridFunction StepOperator::solve(const GridFunction& b) const {
  if (kind_ == LinearSolver::direct) return ldlt_.solve(b);
  GridFunction x = cg_.solve(b);
  if (cg_.info() != Eigen::Success) throw SolverDiverged("CG did not reach tolerance");
  return x;
}

template <int n>
double dirichlet_energy(const NormField<n>& N, const Grid<n>& G, const GridFunction& u) {
  const auto fd = frozen_diffusion(N, G, u);
  return 0.5 * u.dot(fd.S * u);
}

template <int n>
GridFunction discrete_laplacian(const NormField<n>& N, const Grid<n>& G, const GridFunction& u) {
  const auto fd = frozen_diffusion(N, G, u);
  return -(fd.S * u).cwiseQuotient(G.w);
}

namespace {

template <int n>
std::shared_ptr<const StepOperator> make_step(const Grid<n>& G, const FrozenDiffusion<n>& fd,
                                              const FlowOptions<n>& opt) {
  Eigen::SparseMatrix<double> M = fd.S * opt.dt;
  for (int k = 0; k < G.size(); ++k) M.coeffRef(k, k) += G.w[k];
  M.makeCompressed();
  return std::make_shared<const StepOperator>(std::move(M), opt.solver, opt.cg_tol,
                                              opt.cg_max_iter);
}

}  // namespace

template <int n>
GridFunction heat_step(const NormField<n>& N, const Grid<n>& G, const GridFunction& u,
                       const FlowOptions<n>& opt) {
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be positive");
  const auto fd = frozen_diffusion(N, G, u, opt);
  return make_step(G, fd, opt)->solve(u.cwiseProduct(G.w));
}

template <int n>
int FlowTrace<n>::step_index(double t) const {
  const double k = std::round(t / dt);
  if (!(std::abs(k * dt - t) <= 1e-9 * std::max(1.0, std::abs(t))) || k < 0 ||
      k > static_cast<double>(steps.size()))
    throw OutOfRange("time not on the trace");
  return static_cast<int>(k);
}

template <int n>
bool FlowTrace<n>::energy_monotone(double slack) const {
  for (size_t k = 1; k < energies.size(); ++k)
    if (energies[k] > energies[k - 1] + slack) return false;
  return true;
}

template <int n>
double FlowTrace<n>::mass_drift() const {
  double d = 0.0;
  for (double m : masses) d = std::max(d, std::abs(m - masses.front()));
  return d;
}

template <int n>
FlowTrace<n> run_flow(const NormField<n>& N, const Grid<n>& G, const GridFunction& u0, double T,
                      const FlowOptions<n>& opt) {
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(T >= 0.0)) throw ConfigError("T must be nonnegative");
  FlowTrace<n> tr;
  tr.grid = G;
  tr.dt = opt.dt;
  const int steps = static_cast<int>(std::llround(T / opt.dt));
  GridFunction u = u0;
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.states.push_back(u);
    tr.energies.push_back(dirichlet_energy(N, G, u));
    tr.masses.push_back(u.dot(G.w));
  };
  record(0.0);
  for (int s = 0; s < steps; ++s) {
    auto fd = frozen_diffusion(N, G, u, opt);
    auto op = make_step(G, fd, opt);
    u = op->solve(u.cwiseProduct(G.w));
    tr.diffusions.push_back(std::move(fd));
    tr.steps.push_back(std::move(op));
    record((s + 1) * opt.dt);
  }
  return tr;
}

template <int n>
GridFunction linearized_semigroup(const FlowTrace<n>& tr, const GridFunction& f, double s,
                                  double t) {
  const int a = tr.step_index(s), b = tr.step_index(t);
  if (a > b) throw OutOfRange("s > t");
  GridFunction g = f;
  for (int k = a; k < b; ++k) g = tr.steps[k]->solve(g.cwiseProduct(tr.grid.w));
  return g;
}

template <int n>
GridFunction adjoint_semigroup(const FlowTrace<n>& tr, const GridFunction& phi, double s,
                               double t) {
  const int a = tr.step_index(s), b = tr.step_index(t);
  if (a > b) throw OutOfRange("s > t");
  GridFunction psi = phi.cwiseProduct(tr.grid.w);
  for (int k = b - 1; k >= a; --k) psi = tr.steps[k]->solve(psi).cwiseProduct(tr.grid.w);
  return psi.cwiseQuotient(tr.grid.w);
}

template <int n>
double variance(const Grid<n>& G, const GridFunction& f) {
  if (!G.normalized()) throw NotNormalized();
  const double mean = f.dot(G.w);
  return (f.array() - mean).square().matrix().dot(G.w);
}

template <int n>
std::string trace_csv(const FlowTrace<n>& tr, int stride) {
  std::string out;
  CsvWriter w(out);
  if constexpr (n == 1)
    w.header({"t", "node", "x1", "u"});
  else
    w.header({"t", "node", "x1", "x2", "u"});
  for (size_t s = 0; s < tr.states.size(); s += std::max(stride, 1)) {
    for (int k = 0; k < tr.grid.size(); ++k) {
      const Point<n> x = tr.grid.point(k);
      w.cell(tr.times[s]).cell(k);
      for (int a = 0; a < n; ++a) w.cell(x[a]);
      w.cell(tr.states[s][k]).end();
    }
  }
  return out;
}

template <int n>
std::string energies_csv(const FlowTrace<n>& tr) {
  std::string out;
  CsvWriter w(out);
  w.header({"t", "energy", "mass"});
  for (size_t s = 0; s < tr.times.size(); ++s)
    w.cell(tr.times[s]).cell(tr.energies[s]).cell(tr.masses[s]).end();
  return out;
}

#define FINSLER_INSTANTIATE_HEAT(n)                                                              \
  template struct Grid<n>;                                                                       \
  template struct FlowTrace<n>;                                                                  \
  template Grid<n> make_grid<n>(const NormField<n>&, const std::array<int, n>&, bool);           \
  template std::vector<Point<n>> cell_differentials<n>(const Grid<n>&, const GridFunction&);     \
  template std::vector<Point<n>> nodal_differentials<n>(const Grid<n>&, const GridFunction&);    \
  template GridFunction nodal_dual_norm_sq<n>(const NormField<n>&, const Grid<n>&,               \
                                              const GridFunction&);                              \
  template FrozenDiffusion<n> frozen_diffusion<n>(const NormField<n>&, const Grid<n>&,           \
                                                  const GridFunction&, const FlowOptions<n>&);   \
  template double dirichlet_energy<n>(const NormField<n>&, const Grid<n>&, const GridFunction&); \
  template GridFunction discrete_laplacian<n>(const NormField<n>&, const Grid<n>&,               \
                                              const GridFunction&);                              \
  template GridFunction heat_step<n>(const NormField<n>&, const Grid<n>&, const GridFunction&,   \
                                     const FlowOptions<n>&);                                     \
  template FlowTrace<n> run_flow<n>(const NormField<n>&, const Grid<n>&, const GridFunction&,    \
                                    double, const FlowOptions<n>&);                              \
  template GridFunction linearized_semigroup<n>(const FlowTrace<n>&, const GridFunction&,        \
                                                double, double);                                 \
  template GridFunction adjoint_semigroup<n>(const FlowTrace<n>&, const GridFunction&, double,   \
                                             double);                                            \
  template double variance<n>(const Grid<n>&, const GridFunction&);                              \
  template std::string trace_csv<n>(const FlowTrace<n>&, int);                                   \
  template std::string energies_csv<n>(const FlowTrace<n>&);

FINSLER_INSTANTIATE_HEAT(1)
FINSLER_INSTANTIATE_HEAT(2)

}  // namespace finsler

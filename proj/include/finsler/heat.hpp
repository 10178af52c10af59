#pragma once

// Nonlinear heat flow on weighted grids and the linearized semigroups frozen
// along it.
//
// Discretization. The domain is covered by cells: faces between neighbouring
// nodes in 1D, squares with four corner nodes in 2D. Each cell carries a
// frozen coefficient matrix C = g*(Du_cell) and a quadratic form
//   B_c(u, u) = sum_e kappa_e (u_a - u_b)^2
// over its edges. In 2D, C is split along the axes and the two diagonals,
//   C = mu1 e1 e1^T + mu2 e2 e2^T + mu3 p p^T + mu4 q q^T,
// with p = (h1, h2), q = (h1, -h2). The stiffness S = sum_c w_c B_c is
// symmetric, so summation by parts, mass conservation and the adjoint pairing
// hold to round-off. When every kappa_e >= 0 the implicit step matrix
// W + dt S is an M-matrix for any dt.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "finsler/minkowski.hpp"

namespace finsler {

using GridFunction = Eigen::VectorXd;

enum class Topology { periodic, zero_flux };

template <int n>
struct Cell {
  static constexpr int kCorners = 1 << n;
  std::array<int, kCorners> corner{};  // 1D: (i, i+1); 2D: (00, 10, 01, 11)
  Point<n> center;
  double w = 0.0;
};

template <int n>
struct Grid {
  Topology topology = Topology::periodic;
  std::array<int, n> nodes{};
  std::array<double, n> h{};
  Point<n> lo;  // position of node 0
  GridFunction w;
  std::vector<Cell<n>> cells;

  int size() const;
  std::array<int, n> multi_index(int k) const;
  int index(const std::array<int, n>& m) const;
  Point<n> point(int k) const;
  /// Outermost ring of a zero-flux grid; never true on periodic grids.
  bool is_boundary(int k) const;
  double total_weight() const { return w.sum(); }
  bool normalized(double tol = 1e-12) const { return std::abs(total_weight() - 1.0) <= tol; }
};

/// Grid adapted to the chart of N: periodic on a torus chart, zero-flux
/// cell-centred on [-L, L]^n for an interval chart. Node weights are
/// e^{Phi(x)} h^n, rescaled to total 1 when normalize is set.
template <int n>
Grid<n> make_grid(const NormField<n>& N, const std::array<int, n>& nodes, bool normalize);

enum class LinearSolver { direct, cg };

template <int n>
struct FlowOptions {
  double dt = 1e-3;
  LinearSolver solver = LinearSolver::direct;
  double cg_tol = 1e-12;
  int cg_max_iter = 10000;
  /// Direction used where Du vanishes; normalized to F = 1 on each cell.
  Point<n> fallback = Point<n>::Unit(0);
};

template <int n>
struct FrozenDiffusion {
  std::vector<Mat<double, n>> C;      // g*(Du) per cell
  std::vector<char> fallback;         // 1 where Du = 0 on the cell
  bool monotone = true;               // all edge coefficients nonnegative
  Eigen::SparseMatrix<double> S;      // stiffness matrix
};

template <int n>
FrozenDiffusion<n> frozen_diffusion(const NormField<n>& N, const Grid<n>& G, const GridFunction& u,
                                    const FlowOptions<n>& opt = {});

/// Solver for (W + dt S) x = b.
class StepOperator {
 public:
  StepOperator(Eigen::SparseMatrix<double> M, LinearSolver solver, double tol, int max_iter);
  GridFunction solve(const GridFunction& b) const;
  const Eigen::SparseMatrix<double>& matrix() const { return M_; }

 private:
  Eigen::SparseMatrix<double> M_;
  LinearSolver kind_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg_;
};

/// Per-cell gradients Du_c.
template <int n>
std::vector<Point<n>> cell_differentials(const Grid<n>& G, const GridFunction& u);

/// Nodal Du by centred differences (one-sided on zero-flux boundaries).
template <int n>
std::vector<Point<n>> nodal_differentials(const Grid<n>& G, const GridFunction& u);

/// F*(Du)^2 at the nodes, from nodal_differentials.
template <int n>
GridFunction nodal_dual_norm_sq(const NormField<n>& N, const Grid<n>& G, const GridFunction& u);

/// 1/2 sum_c w_c B_c(u, u) with B frozen at u itself. In 1D this is exactly
/// 1/2 sum_faces w_f F*(Du_f)^2.
template <int n>
double dirichlet_energy(const NormField<n>& N, const Grid<n>& G, const GridFunction& u);

/// Discrete nonlinear Laplacian -W^{-1} S(u) u.
template <int n>
GridFunction discrete_laplacian(const NormField<n>& N, const Grid<n>& G, const GridFunction& u);

/// One semi-implicit step: freeze at u and solve (I - dt Delta^V) u+ = u.
template <int n>
GridFunction heat_step(const NormField<n>& N, const Grid<n>& G, const GridFunction& u,
                       const FlowOptions<n>& opt = {});

template <int n>
struct FlowTrace {
  Grid<n> grid;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<GridFunction> states;
  std::vector<FrozenDiffusion<n>> diffusions;  // one per step
  std::vector<double> energies;
  std::vector<double> masses;
  std::vector<std::shared_ptr<const StepOperator>> steps;

  /// Index of time t on the trace; throws OutOfRange.
  int step_index(double t) const;
  double final_time() const { return times.back(); }
  bool energy_monotone(double slack = 1e-12) const;
  double mass_drift() const;
};

template <int n>
FlowTrace<n> run_flow(const NormField<n>& N, const Grid<n>& G, const GridFunction& u0, double T,
                      const FlowOptions<n>& opt = {});

/// P_{s,t} f: f evolved by the frozen linear steps of the trace.
template <int n>
GridFunction linearized_semigroup(const FlowTrace<n>& tr, const GridFunction& f, double s, double t);

/// Adjoint W^{-1} P_{s,t}^T W phi built from the transposed step matrices.
template <int n>
GridFunction adjoint_semigroup(const FlowTrace<n>& tr, const GridFunction& phi, double s, double t);

/// Var_m(f) for normalized weights; throws NotNormalized.
template <int n>
double variance(const Grid<n>& G, const GridFunction& f);

/// Weighted L2 norm.
template <int n>
double l2_norm(const Grid<n>& G, const GridFunction& f) {
  return std::sqrt(f.cwiseProduct(f).dot(G.w));
}

/// Evaluate a callable at every node.
template <int n, class Fn>
GridFunction sample(const Grid<n>& G, Fn&& fn) {
  GridFunction r(G.size());
  for (int k = 0; k < G.size(); ++k) r[k] = fn(G.point(k));
  return r;
}

/// Trace states as CSV (t, node, x1[, x2], u) and energies (t, energy, mass).
template <int n>
std::string trace_csv(const FlowTrace<n>& tr, int stride = 1);
template <int n>
std::string energies_csv(const FlowTrace<n>& tr);

}  // namespace finsler

#pragma once

// Isoperimetric profiles and the Gaussian lower bound.
//
// Boundary measures are Minkowski exterior measures of forward
// neighbourhoods, B+(A, eps) = {y : d(A, y) < eps} with d(x, y) the forward
// distance. In 1D the candidate sets are half-lines and the measure has a
// closed form. In 2D the candidates are half-planes, whose forward dilations
// (the superlevel sets of max{1 - d(A, .)/eps, 0}) are again half-planes when
// F does not depend on x, so sweeping thresholds covers that family.

#include <limits>
#include <string>
#include <vector>

#include "finsler/checks.hpp"
#include "finsler/gaussian.hpp"
#include "finsler/heat.hpp"

namespace finsler {

struct GaussianModel {
  double K = 1.0;

  double density(double x) const {
    return std::sqrt(K / (2.0 * std::numbers::pi)) * std::exp(-0.5 * K * x * x);
  }
  double cdf(double x) const { return gauss_cdf(std::sqrt(K) * x); }
  /// c(theta): the half-line (-inf, c] has mass theta.
  double threshold(double theta) const { return gauss_cdf_inverse(theta) / std::sqrt(K); }
  double profile(double theta) const { return gaussian_profile(K, theta); }
};

/// forward: A = (-inf, c]; backward: A = [c, inf).
enum class Sweep { forward, backward };

std::string to_string(Sweep s);

struct ProfilePoint {
  double theta = 0.0;
  double boundary = 0.0;  // m+(A)
  double c = 0.0;         // threshold of the witness set
  std::string sweep;      // "forward", "backward" or "angle=<rad>"
};

/// Normalized measure e^phi dx on the line domain of a 1D chart (the
/// interval [-L, L], or R for a plane chart). Masses are closed-form through
/// erfc when phi is quadratic and integrated by Gauss-Kronrod otherwise.
class LineMeasure {
 public:
  explicit LineMeasure(const NormField<1>& N);

  double density(double x) const;
  double mass_below(double c) const;
  double mass_above(double c) const;
  /// c with mass_below(c) = theta (forward) or mass_above(c) = theta (backward).
  double threshold(double theta, Sweep s) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double raw(double x) const;
  double integral(double a, double b) const;

  ScalarExpr<1> phi_;
  double lo_, hi_;
  bool gaussian_ = false;
  double mu_ = 0.0, sigma_ = 1.0, tlo_ = 0.0, thi_ = 1.0;
  double Z_ = 1.0;
};

/// Half-line boundary measure: m+((-inf, c]) = rho(c)/F(c, 1) and
/// m+([c, inf)) = rho(c)/F(c, -1).
ProfilePoint halfline_profile_1d(const NormField<1>& N, Sweep s, double c);
ProfilePoint halfline_profile_at(const NormField<1>& N, Sweep s, double theta);

/// Profile over both half-line families: the smaller boundary at each theta.
std::vector<ProfilePoint> halfline_profile(const NormField<1>& N, const std::vector<double>& thetas);

/// Grid on the chart's box: the heat grid for interval and torus charts, and
/// the zero-flux box [-L, L]^n for a plane chart. Weights are normalized.
template <int n>
Grid<n> isoperimetry_grid(const NormField<n>& N, const std::array<int, n>& nodes);

using NodeSet = std::vector<char>;

/// Node set with an optional level function, A = {level <= 0}. The boundary
/// of A crosses every grid edge joining A to its complement where the linear
/// interpolant of level vanishes (at the midpoint without a level); in 2D the
/// crossings are joined cell by cell (marching squares).
struct GridSet {
  NodeSet inside;
  GridFunction level;
};

/// Forward distance d(A, y) from the reconstructed boundary of A to every
/// node, 0 on A and +inf beyond r_max. For F independent of x this is
/// min F(y - p) over points p sampled along the boundary. Otherwise nodes near the
/// boundary get F(midpoint, y - p) and a 16-neighbour (1D: 2-neighbour) graph
/// Dijkstra with edge cost F(midpoint, step) carries it further; on 2D grids
/// the stencil's angular resolution makes this an overestimate.
template <int n>
GridFunction forward_distance(const NormField<n>& N, const Grid<n>& G, const GridSet& A, double r_max);

/// Default radii eps_k = (6 + k) s, k = 0..10, with s the largest distance
/// between axis neighbours.
template <int n>
std::vector<double> default_eps(const NormField<n>& N, const Grid<n>& G);

/// m+(A) on the grid. With psi(s) = (s(1-s))^4 and E(r) = m(B+(A, r)) - m(A),
///   int psi(d(A, .)/eps) dm = -int_0^eps E(r) psi'(r/eps) dr/eps = m+ eps int psi + O(eps^2),
/// a weighted average of the excesses whose integrand vanishes smoothly at the
/// boundary of A, so lattice sums of it carry little grid phase error.
/// S(eps) = int psi(d/eps) dm / (eps int psi) is fitted by a cubic in eps
/// over the radii and m+ is its value at 0.
template <int n>
double minkowski_content(const NormField<n>& N, const Grid<n>& G, const GridSet& A,
                         std::vector<double> eps = {});
template <int n>
double minkowski_content(const NormField<n>& N, const Grid<n>& G, const NodeSet& A,
                         std::vector<double> eps = {}) {
  return minkowski_content(N, G, GridSet{A, {}}, std::move(eps));
}

/// Half-plane {nu . x <= c} of mass closest to theta, for nu at the given
/// angle, with level nu . x - c. The cut c lies midway between node projections.
GridSet halfplane_set(const Grid<2>& G, double angle, double theta, double* c_out = nullptr);

/// Min over `directions` equally spaced half-plane normals of m+ at each theta.
std::vector<ProfilePoint> halfplane_profile(const NormField<2>& N, const Grid<2>& G,
                                            const std::vector<double>& thetas, int directions = 8,
                                            const std::vector<double>& eps = {});

/// Sampled largest K with Phi((1-l)x + l y) <= (1-l)Phi(x) + l Phi(y) - K/2 (1-l) l d^2(x, y),
/// Phi = -phi and d(x, y) = F(y - x), minus 1% of its magnitude. Needs F independent of x.
template <int n>
double convexity_modulus(const NormField<n>& N, int samples = 4000, unsigned long long seed = 1);

/// Largest certified K: the Ric_inf bound, or the convexity modulus when larger.
template <int n>
double certified_isoperimetric_K(const NormField<n>& N);

/// m+ >= I_K(theta) - tol over the profile points. K must be certified.
template <int n>
CheckReport check_bakry_ledoux(const NormField<n>& N, const std::vector<ProfilePoint>& profile,
                               double total_mass, double K, double tol);

/// The weaker bound m+ >= I_K(theta)/Lambda_F, with the improvement
/// min (I_K - I_K/Lambda_F) over the profile in the note.
CheckReport check_needle_bound(const std::vector<ProfilePoint>& profile, double K, double Lambda_F);

/// Columns theta,m_plus,I_K,needle_bound,c,sweep.
std::string profile_csv(const std::vector<ProfilePoint>& profile, double K, double Lambda_F);

}  // namespace finsler

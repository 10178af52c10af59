#pragma once

// Standard Gaussian distribution function phi, its inverse, and
// script-N(theta) = phi'(phi^{-1}(theta)).

#include <cmath>
#include <numbers>

#include "finsler/errors.hpp"

namespace finsler {

inline double gauss_density(double c) {
  return std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
}

/// phi(c) = P(Z <= c), through erfc so that both tails keep relative accuracy.
inline double gauss_cdf(double c) { return 0.5 * std::erfc(-c / std::numbers::sqrt2); }

/// phi^{-1} on (0, 1): bisection to a bracket of width 1e-3, then Newton to 1e-13.
inline double gauss_cdf_inverse(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw OutOfRange("phi^{-1} needs theta in (0, 1)");
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (gauss_cdf(mid) < theta ? lo : hi) = mid;
  }
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    // r = theta - phi(c), written with the smaller tail to avoid cancellation.
    const double r = theta > 0.5 ? (0.5 * std::erfc(c / std::numbers::sqrt2) - (1.0 - theta))
                                 : (theta - gauss_cdf(c));
    const double step = r / gauss_density(c);
    c += step;
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(c))) break;
  }
  return c;
}

/// script-N(theta), with N(0) = N(1) = 0.
inline double script_N(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw OutOfRange("script_N needs theta in [0, 1]");
  if (theta == 0.0 || theta == 1.0) return 0.0;
  return gauss_density(gauss_cdf_inverse(theta));
}

/// N'(theta) = -phi^{-1}(theta).
inline double script_N_prime(double theta) { return -gauss_cdf_inverse(theta); }

/// I_K(theta) = sqrt(K/2pi) exp(-K c^2/2) with phi_K(c) = theta.
inline double gaussian_profile(double K, double theta) {
  if (!(K > 0.0)) throw OutOfRange("gaussian_profile needs K > 0");
  if (!(theta >= 0.0 && theta <= 1.0)) throw OutOfRange("gaussian_profile needs theta in [0, 1]");
  if (theta == 0.0 || theta == 1.0) return 0.0;
  // c(theta) for the K-Gaussian: phi(sqrt(K) c) = theta.
  const double c = gauss_cdf_inverse(theta) / std::sqrt(K);
  return std::sqrt(K / (2.0 * std::numbers::pi)) * std::exp(-0.5 * K * c * c);
}

}  // namespace finsler

#pragma once

namespace afw {

// Reference functions controlling the curvature of self-concordant barriers.

// omega(t) = t - ln(1 + t), defined for t > -1.
double omega(double t);

// omega_star(t) = -t - ln(1 - t), defined for t < 1. Fenchel conjugate of
// omega; also omega_star(t) == omega(-t).
double omega_star(double t);

// Upper bound t^2 / (2 (1 - t)) of omega_star on [0, 1).
double omega_star_ub(double t);

// Inverse of omega_star_ub on [0, +inf): sqrt(s^2 + 2 s) - s.
double omega_star_ub_inv(double s);

// Coefficients of the quadratic / linear lower bounds of omega:
//   omega(t) >= mu_beta(b)   * t^2 for t in [0, b],
//   omega(t) >= varrho_beta(b) * t  for t >= b.
double mu_beta(double beta);
double varrho_beta(double beta);

}  // namespace afw

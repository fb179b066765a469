#include "afw/omega.hpp"

#include <cmath>
#include <stdexcept>

namespace afw {

double omega(double t) {
  if (!(t > -1.0)) throw std::domain_error("omega: requires t > -1");
  return t - std::log1p(t);
}

double omega_star(double t) {
  if (!(t < 1.0)) throw std::domain_error("omega_star: requires t < 1");
  return -t - std::log1p(-t);
}

double omega_star_ub(double t) {
  if (!(t >= 0.0 && t < 1.0))
    throw std::domain_error("omega_star_ub: requires 0 <= t < 1");
  return t * t / (2.0 * (1.0 - t));
}

double omega_star_ub_inv(double s) {
  if (!(s >= 0.0)) throw std::domain_error("omega_star_ub_inv: requires s >= 0");
  return std::sqrt(s * s + 2.0 * s) - s;
}

double mu_beta(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("mu_beta: requires beta > 0");
  return omega(beta) / (beta * beta);
}

double varrho_beta(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("varrho_beta: requires beta > 0");
  return omega(beta) / beta;
}

}  // namespace afw

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "afw/omega.hpp"

using namespace afw;

TEST_CASE("omega closed form") {
  CHECK(omega(0.0) == 0.0);
  CHECK(omega(1.0) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
  CHECK(omega(0.5) == doctest::Approx(0.5 - std::log(1.5)).epsilon(1e-12));
  CHECK_THROWS_AS(omega(-1.0), std::domain_error);
  CHECK_THROWS_AS(omega(-2.0), std::domain_error);
}

TEST_CASE("omega_star closed form") {
  CHECK(omega_star(0.0) == 0.0);
  CHECK(omega_star(0.5) ==
        doctest::Approx(-0.5 + std::log(2.0)).epsilon(1e-12));
  CHECK(omega_star(0.9) ==
        doctest::Approx(-0.9 + std::log(10.0)).epsilon(1e-12));
  CHECK_THROWS_AS(omega_star(1.0), std::domain_error);
}

TEST_CASE("omega_star upper bound and inverse") {
  CHECK(omega_star_ub(0.0) == 0.0);
  CHECK(omega_star_ub(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(omega_star_ub(0.5) >= omega_star(0.5));
  CHECK(omega_star_ub_inv(0.0) == 0.0);
  for (double s : {0.1, 0.5, 1.0, 3.0}) {
    double t = omega_star_ub_inv(s);
    CHECK(omega_star_ub(t) == doctest::Approx(s).epsilon(1e-12));
  }
  CHECK_THROWS_AS(omega_star_ub(1.0), std::domain_error);
  CHECK_THROWS_AS(omega_star_ub(-0.1), std::domain_error);
}

TEST_CASE("quadratic and linear lower-bound coefficients") {
  CHECK(mu_beta(0.5) == doctest::Approx(4.0 * omega(0.5)).epsilon(1e-15));
  CHECK(varrho_beta(0.5) == doctest::Approx(2.0 * omega(0.5)).epsilon(1e-15));
  // the constants the convergence analysis relies on
  CHECK(mu_beta(0.5) >= 1.0 / 2.65);
  CHECK(varrho_beta(0.5) >= 1.0 / 5.3);
  for (double beta : {0.25, 0.5, 1.0, 2.0}) {
    CHECK(mu_beta(beta) * beta * beta ==
          doctest::Approx(omega(beta)).epsilon(1e-15));
    CHECK(varrho_beta(beta) * beta ==
          doctest::Approx(omega(beta)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(mu_beta(0.0), std::domain_error);
  CHECK_THROWS_AS(varrho_beta(-1.0), std::domain_error);
}

TEST_CASE("lower bounds of omega hold on random samples") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> uniform(1e-9, 10.0);
  for (double beta : {0.25, 0.5, 1.0, 2.0}) {
    double mu = mu_beta(beta);
    double rho = varrho_beta(beta);
    for (int i = 0; i < 1000; ++i) {
      double t = uniform(rng);
      if (t <= beta) CHECK(omega(t) >= mu * t * t - 1e-12);
      if (t >= beta) CHECK(omega(t) >= rho * t - 1e-12);
    }
  }
}

TEST_CASE("omega_star bound and reflection identity on random samples") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uniform(0.0, 0.999);
  for (int i = 0; i < 1000; ++i) {
    double t = uniform(rng);
    CHECK(omega_star(t) <= omega_star_ub(t) + 1e-12);
    CHECK(omega_star(t) == doctest::Approx(omega(-t)).epsilon(1e-12));
  }
}

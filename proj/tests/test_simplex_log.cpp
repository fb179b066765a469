#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "afw/simplex_log.hpp"
#include "afw/solver.hpp"
#include "oracles.hpp"

using namespace afw;

TEST_CASE("construction rejects bad rows") {
  Eigen::MatrixXd negative(2, 2);
  negative << 1.0, -0.5, 0.5, 1.0;
  CHECK_THROWS_AS(SimplexLogInstance{negative}, std::invalid_argument);
  Eigen::MatrixXd zero_row(2, 2);
  zero_row << 1.0, 0.5, 0.0, 0.0;
  CHECK_THROWS_AS(SimplexLogInstance{zero_row}, std::invalid_argument);
}

TEST_CASE("identity-rows instance hand values") {
  SimplexLogInstance instance(Eigen::MatrixXd::Identity(2, 2), /*q=*/2);
  AtomSet simplex = AtomSet::standard_simplex(2);
  ActiveSet x(&simplex, {0, 1}, {0.25, 0.75});
  instance.reset(x);
  CHECK(instance.objective() ==
        doctest::Approx(-std::log(0.25) - std::log(0.75)).epsilon(1e-12));
  Eigen::VectorXd scores = instance.atom_scores();
  CHECK(scores[0] == doctest::Approx(-4.0));
  CHECK(scores[1] == doctest::Approx(-4.0 / 3.0));
  // <grad, x> = -theta
  CHECK(scores.dot(x.dense_weights()) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("symmetric data keeps the uniform gradient symmetric") {
  Eigen::MatrixXd rows(2, 2);
  rows << 1.0, 2.0,
          2.0, 1.0;
  SimplexLogInstance instance(rows);
  ActiveSet x = ActiveSet::uniform(instance.atom_set());
  instance.reset(x);
  Eigen::VectorXd scores = instance.atom_scores();
  CHECK(scores[0] == doctest::Approx(scores[1]).epsilon(1e-12));
}

TEST_CASE("gradient pairing identity at random interior points") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    int r = 7, p = 5;
    Eigen::MatrixXd rows(r, p);
    for (int i = 0; i < r; ++i)
      rows.row(i) = oracle::random_positive(p, rng, 0.05, 2.0).transpose();
    SimplexLogInstance instance(rows);
    Eigen::VectorXd w = oracle::random_simplex_point(p, rng);
    double f;
    Eigen::VectorXd scores;
    instance.eval_dense(w, &f, &scores);
    double pairing = scores.dot(w);
    CHECK(std::abs(pairing + r) <= 1e-8 * r);
  }
}

TEST_CASE("direction norm matches the dense barrier quadratic form") {
  std::mt19937_64 rng(9);
  int r = 6, p = 4;
  Eigen::MatrixXd rows(r, p);
  for (int i = 0; i < r; ++i)
    rows.row(i) = oracle::random_positive(p, rng, 0.1, 2.0).transpose();
  SimplexLogInstance instance(rows);
  ActiveSet x = ActiveSet::uniform(instance.atom_set());
  instance.reset(x);
  Eigen::VectorXd u = instance.row_products();
  for (int atom = 0; atom < p; ++atom) {
    Eigen::VectorXd ad = rows.col(atom) - u;
    double dense = std::sqrt(instance.barrier().hess_qform(u, ad));
    CHECK(instance.direction_local_norm(atom) ==
          doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("newton line-search matches golden section") {
  std::mt19937_64 rng(303);
  int checked = 0;
  for (int trial = 0; checked < 40; ++trial) {
    REQUIRE(trial < 200);
    int r = 8, p = 5;
    Eigen::MatrixXd rows(r, p);
    for (int i = 0; i < r; ++i)
      rows.row(i) = oracle::random_positive(p, rng, 0.02, 2.0).transpose();
    SimplexLogInstance instance(rows);
    Eigen::VectorXd w = oracle::random_simplex_point(p, rng);
    ActiveSet x = ActiveSet::from_dense(instance.atom_set(), w);
    instance.reset(x);
    Eigen::VectorXd scores = instance.atom_scores();
    int v = lmo_on_scores(scores);
    double gap = fw_gap(instance, x, v);
    if (!(gap > 1e-6)) continue;
    Direction dir{StepKind::FW, v, 1.0};
    double newton = *instance.closed_form_linesearch(dir);
    Eigen::VectorXd u = instance.row_products();
    Eigen::VectorXd wdir = rows.col(v) - u;
    double hi = 1.0;
    for (int i = 0; i < r; ++i)
      if (wdir[i] < 0.0) hi = std::min(hi, u[i] / -wdir[i] * (1.0 - 1e-12));
    double golden = oracle::golden_section(
        [&](double a) { return instance.objective_along(dir, a); }, 0.0, hi,
        1e-12);
    CHECK(std::abs(newton - golden) <= 1e-8);
    ++checked;
  }
}

TEST_CASE("steps keep the row products positive or throw") {
  Eigen::MatrixXd rows(2, 2);
  rows << 1.0, 0.0,
          0.0, 1.0;
  SimplexLogInstance instance(rows, /*q=*/2);
  AtomSet simplex = AtomSet::standard_simplex(2);
  ActiveSet x(&simplex, {0, 1}, {0.5, 0.5});
  instance.reset(x);
  // a full FW step to atom 0 would zero the second product
  CHECK_FALSE(instance.step_in_domain(Direction{StepKind::FW, 0, 1.0}, 1.0));
  CHECK(instance.step_in_domain(Direction{StepKind::FW, 0, 1.0}, 0.5));
  CHECK_THROWS_AS(instance.apply_step(Direction{StepKind::FW, 0, 1.0}, 1.0),
                  std::runtime_error);
}

TEST_CASE("afw solves the identity-rows instance to the analytic optimum") {
  SimplexLogInstance instance(Eigen::MatrixXd::Identity(2, 2), /*q=*/2);
  AtomSet simplex = AtomSet::standard_simplex(2);
  ActiveSet x0(&simplex, {0, 1}, {0.25, 0.75});
  SolverConfig cfg;
  cfg.check_level = CheckLevel::Full;
  RunResult r = run_afw(instance, cfg, x0);
  CHECK(r.stop == StopReason::Converged);
  CHECK(r.final_objective ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
  CHECK(r.solution.weight_of(0) == doctest::Approx(0.5).epsilon(1e-6));
}

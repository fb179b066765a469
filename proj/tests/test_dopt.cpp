#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "afw/dopt.hpp"
#include "oracles.hpp"

using namespace afw;

namespace {

Eigen::MatrixXd three_point_design() {
  Eigen::MatrixXd pts(2, 3);
  pts << 1.0, 0.0, 1.0,
         0.0, 1.0, 1.0;
  return pts;
}

}  // namespace

TEST_CASE("construction validates the point set") {
  Eigen::MatrixXd too_few(2, 2);
  too_few << 1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(DoptInstance{too_few}, std::invalid_argument);

  Eigen::MatrixXd rank_deficient(2, 3);
  rank_deficient << 1.0, 2.0, 3.0,
                    2.0, 4.0, 6.0;
  CHECK_THROWS_AS(DoptInstance{rank_deficient}, std::invalid_argument);
}

TEST_CASE("three-point instance hand values") {
  DoptInstance instance(three_point_design());
  AtomSet simplex = AtomSet::standard_simplex(3);
  ActiveSet half(&simplex, {0, 1}, {0.5, 0.5});
  instance.reset(half);

  CHECK(instance.objective() == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(instance.scores()[0] == doctest::Approx(2.0));
  CHECK(instance.scores()[1] == doctest::Approx(2.0));
  CHECK(instance.scores()[2] == doctest::Approx(4.0));
  CHECK(instance.score_weight_identity() == doctest::Approx(2.0).epsilon(1e-12));

  ActiveSet opt(&simplex, {0, 1, 2}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  instance.reset(opt);
  CHECK(instance.objective() == doctest::Approx(std::log(3.0)));
  for (int i = 0; i < 3; ++i)
    CHECK(instance.scores()[i] == doctest::Approx(2.0).epsilon(1e-12));
  Eigen::MatrixXd inv = instance.inverse();
  CHECK(inv(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(inv(0, 1) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("closed-form step sizes") {
  CHECK(dopt_linesearch_fw(4.0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(dopt_linesearch_fw(2.0 + 1e-9, 2) ==
        doctest::Approx(0.0).epsilon(1e-6));
  CHECK(dopt_linesearch_fw(1e9, 2) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(dopt_linesearch_fw(1.5, 2), std::invalid_argument);

  CHECK(dopt_linesearch_away(1.5, 2, 10.0) == doctest::Approx(0.5));
  CHECK(dopt_linesearch_away(1.5, 2, 0.3) == doctest::Approx(0.3));
  CHECK(dopt_linesearch_away(0.5, 2, 0.7) == doctest::Approx(0.7));
  CHECK_THROWS_AS(dopt_linesearch_away(2.5, 2, 1.0), std::invalid_argument);
}

TEST_CASE("direction norm formula") {
  CHECK(dopt_direction_norm(4.0, 2) == doctest::Approx(std::sqrt(10.0)));
  CHECK(dopt_direction_norm(2.0, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("closed-form line-searches match golden section on random states") {
  std::mt19937_64 rng(2718);
  int states = 0;
  for (int trial = 0; states < 100; ++trial) {
    REQUIRE(trial < 500);
    int n = 4, m = 14;
    Eigen::MatrixXd pts = dopt_random_points(m, n, 2.0, 37 + trial);
    DoptInstance instance(pts);
    Eigen::VectorXd w = oracle::random_simplex_point(m, rng);
    ActiveSet x = ActiveSet::from_dense(instance.atom_set(), w);
    instance.reset(x);
    const Eigen::VectorXd& g = instance.scores();

    int fw_atom = -1, away_atom = -1;
    for (int i = 0; i < m; ++i) {
      if (g[i] > n + 0.05 && (fw_atom < 0 || g[i] > g[fw_atom])) fw_atom = i;
      if (g[i] < n - 0.05 && w[i] > 1e-4 &&
          (away_atom < 0 || g[i] < g[away_atom]))
        away_atom = i;
    }
    if (fw_atom >= 0) {
      Direction dir{StepKind::FW, fw_atom, 1.0};
      double closed = *instance.closed_form_linesearch(dir);
      double golden = oracle::golden_section(
          [&](double a) { return instance.objective_along(dir, a); }, 0.0,
          1.0 - 1e-9, 1e-12);
      CHECK(std::abs(closed - golden) <= 1e-8);
      ++states;
    }
    if (away_atom >= 0) {
      double beta = w[away_atom];
      Direction dir{StepKind::Away, away_atom, beta / (1.0 - beta)};
      double closed = *instance.closed_form_linesearch(dir);
      double hi = dir.alpha_max;
      double bound = instance.scores()[away_atom] > 1.0
                         ? 0.999 / (instance.scores()[away_atom] - 1.0)
                         : hi;
      hi = std::min(hi, bound);
      double golden = oracle::golden_section(
          [&](double a) { return instance.objective_along(dir, a); }, 0.0, hi,
          1e-12);
      // at an interior optimum both must agree; at the cap both sit at amax
      CHECK(std::abs(closed - golden) <= 1e-8);
      ++states;
    }
  }
}

TEST_CASE("apply_step advances the inverse and scores consistently") {
  DoptInstance instance(three_point_design());
  AtomSet simplex = AtomSet::standard_simplex(3);
  ActiveSet half(&simplex, {0, 1}, {0.5, 0.5});
  instance.reset(half);

  instance.apply_step(Direction{StepKind::FW, 2, 1.0}, 1.0 / 3.0);
  Eigen::MatrixXd m = instance.design_matrix();
  CHECK(m(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  Eigen::MatrixXd inv = instance.inverse();
  CHECK(inv(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(inv(1, 0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(instance.objective() == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("incremental inverse tracks refactorization over 1000 steps") {
  std::mt19937_64 rng(11);
  int n = 5, m = 20;
  Eigen::MatrixXd pts = dopt_random_points(m, n, 1.0, 99);
  DoptInstance instance(pts);
  ActiveSet x = ActiveSet::uniform(instance.atom_set());
  instance.reset(x);

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd w = x.dense_weights();
  for (int step = 0; step < 1000; ++step) {
    int atom = static_cast<int>(uniform(rng) * m);
    bool away = uniform(rng) < 0.4 && w[atom] > 1e-3 && w[atom] < 0.9;
    Direction dir{away ? StepKind::Away : StepKind::FW, atom,
                  away ? w[atom] / (1.0 - w[atom]) : 1.0};
    double frac = 0.05 + 0.4 * uniform(rng);
    double alpha = frac * dir.alpha_max;
    if (!instance.step_in_domain(dir, alpha)) continue;
    instance.apply_step(dir, alpha);
    double scale = dir.kind == StepKind::FW ? 1.0 - alpha : 1.0 + alpha;
    w *= scale;
    w[atom] += dir.kind == StepKind::FW ? alpha : -alpha;
  }

  Eigen::MatrixXd inc = instance.inverse();
  Eigen::VectorXd g_inc = instance.scores();
  instance.refactorize();
  Eigen::MatrixXd fresh = instance.inverse();
  double rel = (inc - fresh).norm() / fresh.norm();
  CHECK(rel <= 1e-6);
  CHECK((g_inc - instance.scores()).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(instance.score_weight_identity() == doctest::Approx(n).epsilon(1e-8));
}

TEST_CASE("direction norm matches the dense barrier quadratic form") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4, m = 10;
    Eigen::MatrixXd pts = dopt_random_points(m, n, 1.5, 7 + trial);
    DoptInstance instance(pts);
    Eigen::VectorXd w = oracle::random_simplex_point(m, rng);
    ActiveSet x = ActiveSet::from_dense(instance.atom_set(), w);
    instance.reset(x);

    const Barrier& barrier = instance.barrier();
    Eigen::MatrixXd design = instance.design_matrix();
    Eigen::VectorXd y = sym_to_vec(design);
    for (int atom = 0; atom < m; ++atom) {
      Eigen::MatrixXd image = pts.col(atom) * pts.col(atom).transpose();
      Eigen::VectorXd ad = sym_to_vec(image) - y;
      double dense = std::sqrt(barrier.hess_qform(y, ad));
      double fast = instance.direction_local_norm(atom);
      CHECK(fast == doctest::Approx(dense).epsilon(1e-8));
    }
  }
}

TEST_CASE("score identity and dense gradient agreement on random instances") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 3, m = 8;
    Eigen::MatrixXd pts = dopt_random_points(m, n, 1.0, 1000 + trial);
    DoptInstance instance(pts);
    Eigen::VectorXd w = oracle::random_simplex_point(m, rng);
    ActiveSet x = ActiveSet::from_dense(instance.atom_set(), w);
    instance.reset(x);
    CHECK(instance.score_weight_identity() == doctest::Approx(n).epsilon(1e-8));

    // chain rule through the barrier: score_j = <grad f(M), a_j a_j^T>
    Eigen::VectorXd y = sym_to_vec(instance.design_matrix());
    Eigen::VectorXd barrier_grad = instance.barrier().gradient(y);
    for (int j = 0; j < m; ++j) {
      Eigen::MatrixXd image = pts.col(j) * pts.col(j).transpose();
      double dense = barrier_grad.dot(sym_to_vec(image));
      CHECK(instance.atom_scores()[j] == doctest::Approx(dense).epsilon(1e-8));
    }
  }
}

TEST_CASE("random point generator") {
  Eigen::MatrixXd a = dopt_random_points(50, 3, 10.0, 2024);
  Eigen::MatrixXd b = dopt_random_points(50, 3, 10.0, 2024);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // reproducible per seed
  Eigen::MatrixXd c = dopt_random_points(50, 3, 10.0, 2025);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);

  // sample covariance approaches scale * I
  int m = 100000, n = 5;
  Eigen::MatrixXd big = dopt_random_points(m, n, 10.0, 31337);
  Eigen::MatrixXd cov = big * big.transpose() / m;
  Eigen::MatrixXd target = 10.0 * Eigen::MatrixXd::Identity(n, n);
  CHECK((cov - target).norm() / target.norm() <= 0.10);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  CHECK(qr.rank() == 3);
}

TEST_CASE("basis selection returns independent columns") {
  Eigen::MatrixXd pts = dopt_random_points(12, 4, 1.0, 5);
  std::vector<int> basis = dopt_select_basis(pts);
  REQUIRE(basis.size() == 4);
  Eigen::MatrixXd sub(4, 4);
  for (int i = 0; i < 4; ++i) sub.col(i) = pts.col(basis[i]);
  CHECK(std::abs(sub.determinant()) > 1e-8);
}

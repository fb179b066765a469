#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <random>

#include "afw/atoms.hpp"

using namespace afw;

TEST_CASE("lmo picks the minimizing atom, lowest id on ties") {
  AtomSet simplex = AtomSet::standard_simplex(3);
  Eigen::VectorXd grad(3);
  grad << -2.0, -2.0, -4.0;
  CHECK(lmo(simplex, grad) == 2);
  CHECK(lmo(simplex, Eigen::VectorXd::Zero(3)) == 0);
  grad << 1.0, 0.0, 5.0;
  CHECK(lmo(simplex, grad) == 1);
}

TEST_CASE("away oracle maximizes over the support, lowest id on ties") {
  AtomSet simplex = AtomSet::standard_simplex(3);
  Eigen::VectorXd grad(3);
  grad << -2.0, -2.0, -4.0;
  ActiveSet two(&simplex, {0, 1}, {0.5, 0.5});
  CHECK(away_select(two, grad) == 0);
  ActiveSet other(&simplex, {0, 2}, {0.5, 0.5});
  CHECK(away_select(other, grad) == 0);
  ActiveSet single = ActiveSet::single(simplex, 1);
  CHECK(away_select(single, grad) == 1);
}

TEST_CASE("fw weight update") {
  AtomSet simplex = AtomSet::standard_simplex(3);
  ActiveSet start(&simplex, {0, 1}, {0.5, 0.5});

  SUBCASE("full step collapses to the target atom") {
    ActiveSet out = fw_weight_update(start, 2, 1.0);
    CHECK(out.support_size() == 1);
    CHECK(out.weight_of(2) == 1.0);
  }
  SUBCASE("one-third step toward a new atom") {
    ActiveSet out = fw_weight_update(start, 2, 1.0 / 3.0);
    CHECK(out.weight_of(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(out.weight_of(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(out.weight_of(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(out.weight_sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("vanishing step leaves weights essentially unchanged") {
    ActiveSet out = fw_weight_update(start, 0, 1e-300);
    CHECK(out.weight_of(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(fw_weight_update(start, 0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("away weight update") {
  AtomSet simplex = AtomSet::standard_simplex(3);

  SUBCASE("step at alpha_max drops the atom") {
    ActiveSet start(&simplex, {0, 1}, {0.5, 0.5});
    AwayUpdateResult res = away_weight_update(start, 1, 1.0);
    CHECK(res.dropped);
    CHECK(res.active.support_size() == 1);
    CHECK(res.active.weight_of(0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("interior step rebalances") {
    ActiveSet start(&simplex, {0, 1}, {0.75, 0.25});
    AwayUpdateResult res = away_weight_update(start, 1, 1.0 / 9.0);
    CHECK_FALSE(res.dropped);
    CHECK(res.active.weight_of(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(res.active.weight_of(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }
  SUBCASE("singleton support is rejected") {
    ActiveSet one = ActiveSet::single(simplex, 1);
    CHECK_THROWS_AS(away_weight_update(one, 1, 0.5), std::invalid_argument);
  }
  SUBCASE("alpha beyond alpha_max is rejected") {
    ActiveSet start(&simplex, {0, 1}, {0.5, 0.5});
    CHECK_THROWS_AS(away_weight_update(start, 1, 1.5), std::invalid_argument);
  }
}

TEST_CASE("weight updates keep the invariants over random sequences") {
  AtomSet simplex = AtomSet::standard_simplex(6);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ActiveSet active = ActiveSet::uniform(simplex);
  for (int step = 0; step < 400; ++step) {
    int before = active.support_size();
    if (uniform(rng) < 0.5 || active.support_size() == 1) {
      int v = static_cast<int>(uniform(rng) * 6);
      double alpha = 0.01 + 0.5 * uniform(rng);
      active = fw_weight_update(active, v, alpha);
      CHECK(active.support_size() <= before + 1);
    } else {
      int pick = static_cast<int>(uniform(rng) * active.support_size());
      int atom = active.support()[pick];
      double beta = active.weight_of(atom);
      double amax = beta / (1.0 - beta);
      bool full = uniform(rng) < 0.3;
      double alpha = full ? amax : amax * (0.1 + 0.8 * uniform(rng));
      AwayUpdateResult res = away_weight_update(active, atom, alpha);
      if (full) CHECK(res.dropped);
      CHECK(res.active.support_size() == before - (res.dropped ? 1 : 0));
      active = std::move(res.active);
    }
    CHECK(std::abs(active.weight_sum() - 1.0) <= 1e-12);
    CHECK(active.cache_error() <= 1e-10);
    for (double w : active.weights()) CHECK(w > 0.0);
  }
}

TEST_CASE("caratheodory reduction") {
  // 1-d atoms {0, 1, 0.5}; the middle atom is affinely dependent.
  Eigen::MatrixXd pts(1, 3);
  pts << 0.0, 1.0, 0.5;
  AtomSet atoms = AtomSet::from_points(pts);
  ActiveSet heavy(&atoms, {0, 1, 2}, {0.25, 0.25, 0.5});
  double x = heavy.iterate()[0];
  CHECK(x == doctest::Approx(0.375));

  ActiveSet reduced = caratheodory_reduce(heavy);
  CHECK(reduced.support_size() <= 2);
  CHECK(reduced.iterate()[0] == doctest::Approx(0.375).epsilon(1e-12));

  SUBCASE("small supports pass through untouched") {
    ActiveSet small(&atoms, {0, 1}, {0.5, 0.5});
    ActiveSet out = caratheodory_reduce(small);
    CHECK(out.support() == small.support());
    CHECK(out.weights() == small.weights());
  }
  SUBCASE("idempotent") {
    ActiveSet twice = caratheodory_reduce(reduced);
    CHECK(twice.support() == reduced.support());
  }
}

TEST_CASE("caratheodory preserves the iterate on random instances") {
  std::mt19937_64 rng(5150);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    int p = 3, m = 9;
    Eigen::MatrixXd pts(p, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < p; ++i) pts(i, j) = normal(rng);
    AtomSet atoms = AtomSet::from_points(pts);
    std::vector<int> ids(m);
    std::vector<double> w(m);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      ids[j] = j;
      w[j] = uniform(rng);
      sum += w[j];
    }
    for (auto& wi : w) wi /= sum;
    ActiveSet active(&atoms, ids, w);
    Eigen::VectorXd x = active.iterate();
    ActiveSet reduced = caratheodory_reduce(active);
    CHECK(reduced.support_size() <= p + 1);
    CHECK((reduced.iterate() - x).cwiseAbs().maxCoeff() <= 1e-10);
    for (double wi : reduced.weights()) CHECK(wi >= 0.0);
    CHECK(std::abs(reduced.weight_sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("atom csv round trip") {
  Eigen::MatrixXd pts(2, 3);
  pts << 0.25, -1.5, 3.0,
         1.0, 2.0, -0.125;
  AtomSet atoms = AtomSet::from_points(pts);
  std::string path = "atoms_roundtrip_test.csv";
  atoms.save_csv(path);
  AtomSet loaded = AtomSet::load_csv(path);
  CHECK(loaded.size() == 3);
  CHECK(loaded.dimension() == 2);
  CHECK((loaded.points() - pts).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("atom set rejects duplicates and empties") {
  Eigen::MatrixXd dup(2, 2);
  dup << 1.0, 1.0, 2.0, 2.0;
  CHECK_THROWS_AS(AtomSet::from_points(dup), std::invalid_argument);
  CHECK_THROWS_AS(AtomSet::standard_simplex(0), std::invalid_argument);
}

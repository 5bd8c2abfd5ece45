#include "all/oracle.hpp"

#include "all/simplex.hpp"
#include "doctest.h"
#include "testutil.hpp"

#include <random>

using all::LabelDistribution;
using all::OracleStatus;
using all::solve_exact;
using all::Vector;
using all::WeakSignalSet;

namespace {

LabelDistribution dist(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (const double x : values) v[j++] = x;
  return LabelDistribution(v);
}

WeakSignalSet two_signal_fixture(double b = 0.4) {
  std::vector<LabelDistribution> signals{dist({0.3, 0.2}), dist({0.6, 0.1})};
  return WeakSignalSet(signals, Vector::Constant(2, b));
}

}  // namespace

TEST_CASE("solve_exact reproduces the two-example geometry") {
  const auto r = solve_exact(dist({0.18, 0.0}), two_signal_fixture());
  REQUIRE(r.status == OracleStatus::Optimal);
  CHECK(std::abs(r.labels[0] - 0.41) < 0.02);
  CHECK(std::abs(r.labels[1] - 0.23) < 0.02);
  CHECK(std::abs(r.value - 0.336) < 0.02);

  // Invariants: constraints hold at the vertex, and the reported value is
  // the expected error of the returned labeling.
  const Vector slack = all::feasibility(two_signal_fixture(), r.labels);
  CHECK(slack.minCoeff() >= -1e-6);
  CHECK(std::abs(r.value - all::expected_error(dist({0.18, 0.0}), r.labels)) <
        1e-9);
}

TEST_CASE("unconstrained adversary flips every prediction") {
  const auto r = solve_exact(dist({0.9, 0.1}), WeakSignalSet());
  REQUIRE(r.status == OracleStatus::Optimal);
  CHECK(r.labels[0] == doctest::Approx(0.0));
  CHECK(r.labels[1] == doctest::Approx(1.0));
  CHECK(r.value == doctest::Approx(0.9));
}

TEST_CASE("solve_exact matches brute-force enumeration") {
  std::mt19937 gen(101);
  for (int rep = 0; rep < 60; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 3);  // 2..4
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen() % 2);  // 1..2
    const LabelDistribution p(testutil::random_probs(gen, n));
    const WeakSignalSet ws = testutil::random_feasible_signals(gen, n, m);

    const auto exact = solve_exact(p, ws);
    const auto brute = testutil::brute_force_adversary(p, ws);
    REQUIRE(exact.status == OracleStatus::Optimal);
    REQUIRE(brute.feasible);
    CHECK(exact.value == doctest::Approx(brute.value).epsilon(1e-6));

    if (n <= 3) {
      const auto grid = testutil::grid_adversary(p, ws, 0.01);
      CHECK(std::abs(exact.value - grid.value) < 1e-2);
    }
  }
}

TEST_CASE("primal_value on the fixture and degenerate bounds") {
  CHECK(std::abs(all::primal_value(dist({0.18, 0.0}), two_signal_fixture()) -
                 0.336) < 0.02);

  // Vacuous bounds: the adversary zeroes out an all-ones prediction.
  std::vector<LabelDistribution> signals{dist({0.5, 0.5, 0.5})};
  const WeakSignalSet vacuous(signals, Vector::Constant(1, 1.0));
  CHECK(all::primal_value(dist({1.0, 1.0, 1.0}), vacuous) ==
        doctest::Approx(1.0));

  std::mt19937 gen(55);
  const LabelDistribution p(testutil::random_probs(gen, 3));
  const WeakSignalSet ws = testutil::random_feasible_signals(gen, 3, 2);
  const auto grid = testutil::grid_adversary(p, ws, 0.01);
  CHECK(std::abs(all::primal_value(p, ws) - grid.value) < 1e-2);
}

TEST_CASE("infeasible polytope reported as a status, not an exception") {
  // q and its complement cannot both have zero error.
  std::vector<LabelDistribution> signals{dist({1, 0, 1}), dist({0, 1, 0})};
  Vector bounds(2);
  bounds << 0.05, 0.05;
  const WeakSignalSet ws(signals, bounds);

  const auto r = solve_exact(dist({0.5, 0.5, 0.5}), ws);
  CHECK(r.status == OracleStatus::Infeasible);
  CHECK_THROWS_AS(all::primal_value(dist({0.5, 0.5, 0.5}), ws),
                  all::infeasibility_error);
  CHECK_FALSE(all::bounds_feasible(ws));
  CHECK(all::bounds_feasible(two_signal_fixture()));
}

TEST_CASE("upper-bound property: primal dominates the error on any feasible truth") {
  std::mt19937 gen(77);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 5);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen() % 3);
    const LabelDistribution truth(testutil::random_binary(gen, n));

    // Bounds set to the signals' true errors make the truth feasible.
    std::vector<LabelDistribution> signals;
    Vector bounds(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      LabelDistribution q(testutil::random_probs(gen, n));
      bounds[i] = all::constraint_value(q, truth);
      signals.push_back(std::move(q));
    }
    const WeakSignalSet ws(signals, bounds);

    const LabelDistribution p(testutil::random_probs(gen, n));
    CHECK(all::primal_value(p, ws) >=
          all::expected_error(p, truth) - 1e-9);
  }
}

TEST_CASE("optimum lands on a vertex: at most m interior coordinates") {
  std::mt19937 gen(31);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 5);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen() % 3);
    const LabelDistribution p(testutil::random_probs(gen, n));
    const WeakSignalSet ws = testutil::random_feasible_signals(gen, n, m);
    const auto r = solve_exact(p, ws);
    REQUIRE(r.status == OracleStatus::Optimal);
    Eigen::Index interior = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (r.labels[j] > 1e-7 && r.labels[j] < 1.0 - 1e-7) ++interior;
    }
    CHECK(interior <= m);
  }
}

TEST_CASE("the primal objective is convex in the predictions") {
  std::mt19937 gen(47);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 4);
    const WeakSignalSet ws = testutil::random_feasible_signals(gen, n, 2);
    const Vector p1 = testutil::random_probs(gen, n);
    const Vector p2 = testutil::random_probs(gen, n);
    const double t = unit(gen);
    const double lhs = all::primal_value(
        LabelDistribution(t * p1 + (1.0 - t) * p2), ws);
    const double rhs = t * all::primal_value(LabelDistribution(p1), ws) +
                       (1.0 - t) * all::primal_value(LabelDistribution(p2), ws);
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("oracle is deterministic across repeated solves") {
  std::mt19937 gen(91);
  const LabelDistribution p(testutil::random_probs(gen, 5));
  const WeakSignalSet ws = testutil::random_feasible_signals(gen, 5, 3);
  const auto a = solve_exact(p, ws);
  const auto b = solve_exact(p, ws);
  REQUIRE(a.status == OracleStatus::Optimal);
  CHECK((a.labels.probs() - b.labels.probs()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(a.value == b.value);
}

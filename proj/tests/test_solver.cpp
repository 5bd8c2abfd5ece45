#include "all/solver.hpp"

#include "all/oracle.hpp"
#include "doctest.h"
#include "testutil.hpp"

#include <random>
#include <sstream>

using all::ConstraintCache;
using all::DirectModel;
using all::LabelDistribution;
using all::Matrix;
using all::SolverConfig;
using all::TrainStatus;
using all::Vector;
using all::WeakSignalSet;

namespace {

LabelDistribution dist(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (const double x : values) v[j++] = x;
  return LabelDistribution(v);
}

}  // namespace

TEST_CASE("lagrangian reduces to the expected error when nothing binds") {
  std::mt19937 gen(5);
  const auto inst = testutil::random_feasible_instance(gen, 4, 2, 0.1);
  const Vector p = testutil::random_probs(gen, 4);
  const Vector gamma = Vector::Zero(2);
  // The witness satisfies every constraint, so hinge terms vanish and
  // gamma = 0 kills the multiplier terms.
  CHECK(all::lagrangian(p, inst.witness, gamma, inst.ws, 0.7) ==
        doctest::Approx(all::expected_error(LabelDistribution(p),
                                            LabelDistribution(inst.witness)))
            .epsilon(1e-12));

  // Binary signal used as the labeling: constraint value is exactly zero.
  const WeakSignalSet single({dist({1, 0, 1})}, Vector::Constant(1, 0.2));
  const Vector y = dist({1, 0, 1}).probs();
  const Vector p3 = testutil::random_probs(gen, 3);
  CHECK(all::lagrangian(p3, y, Vector::Zero(1), single, 1.0) ==
        doctest::Approx(all::expected_error(LabelDistribution(p3),
                                            LabelDistribution(y)))
            .epsilon(1e-12));
}

TEST_CASE("lagrangian at the two-example adversarial point") {
  const WeakSignalSet ws = testutil::two_example_fixture();
  const Vector p = dist({0.18, 0.0}).probs();
  const Vector y = dist({0.41, 0.23}).probs();
  // Hand evaluation: error term 0.3362; both unnormalized violations are
  // 0.802 - 0.8 = 0.002, so the rho=1 penalty is (1/2)(0.002^2 + 0.002^2).
  const double expected = 0.3362 - 0.5 * (0.002 * 0.002 + 0.002 * 0.002);
  CHECK(all::lagrangian(p, y, Vector::Zero(2), ws, 1.0) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("theta_step follows the error gradient") {
  Matrix X = Matrix::Zero(3, 1);

  SUBCASE("uniform adversarial labels freeze the parameters") {
    DirectModel model(3);
    const Vector before = model.params();
    const Vector after =
        all::theta_step(model, X, Vector::Constant(3, 0.5), 0.5);
    CHECK((after - before).norm() == 0.0);
  }

  SUBCASE("single-example hand evaluation") {
    // n=1, p=0.5, y=1, alpha=1: the logit rises by p(1-p) = 0.25.
    DirectModel model(1);
    const Vector after = all::theta_step(model, Matrix::Zero(1, 1),
                                         Vector::Constant(1, 1.0), 1.0);
    CHECK(after[0] == doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("matches finite differences of the error term") {
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Eigen::Index n = 5, d = 3;
    Matrix Xr(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) Xr(r, c) = unit(gen);
    }
    Vector w(d + 1);
    for (Eigen::Index k = 0; k <= d; ++k) w[k] = unit(gen);
    const Vector y_hat = testutil::random_probs(gen, n);

    all::SigmoidLinearModel model(w);
    const double alpha = 0.3;
    const Vector stepped = all::theta_step(model, Xr, y_hat, alpha);
    const Vector analytic_grad = (w - stepped) / alpha;

    const auto error_at = [&](const Vector& theta) {
      all::SigmoidLinearModel probe(theta);
      return all::detail::disagreement(probe.predict(Xr), y_hat);
    };
    const double h = 1e-6;
    for (Eigen::Index k = 0; k <= d; ++k) {
      Vector hi = w, lo = w;
      hi[k] += h;
      lo[k] -= h;
      const double fd = (error_at(hi) - error_at(lo)) / (2.0 * h);
      CHECK(analytic_grad[k] == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("labels_step projections and hand evaluations") {
  SUBCASE("stationary when constraints are slack, gamma zero, p uniform") {
    std::mt19937 gen(31);
    const auto inst = testutil::random_feasible_instance(gen, 4, 2, 0.2);
    const ConstraintCache cons(inst.ws);
    const Vector y = inst.witness;
    const Vector after = all::labels_step(y, Vector::Constant(4, 0.5), cons,
                                          Vector::Zero(2), 0.1, 0.5);
    CHECK((after - y).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("unconstrained single example ascends and clips") {
    // n=1, m=0, p=0, y=0.5, alpha=1: ascent by 1, clipped at 1.
    const ConstraintCache cons(WeakSignalSet{});
    const Vector after =
        all::labels_step(Vector::Constant(1, 0.5), Vector::Zero(1), cons,
                         Vector(0), 1.0, 0.1);
    CHECK(after[0] == doctest::Approx(1.0));
  }

  SUBCASE("repeated application reaches the exact inner optimum") {
    std::mt19937 gen(71);
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::Index n = 6, m = 2;
      const auto inst = testutil::random_feasible_instance(gen, n, m);
      const LabelDistribution p(testutil::random_probs(gen, n));
      const Vector reached =
          testutil::frozen_inner_ascent(p.probs(), inst.ws, inst.witness);
      const double exact = all::primal_value(p, inst.ws);
      CHECK(std::abs(all::detail::disagreement(p.probs(), reached) - exact) <
            1e-3);
    }
  }
}

TEST_CASE("multipliers_step hinge arithmetic") {
  // One signal over two examples with constraint value 0.45 against y.
  const WeakSignalSet ws({dist({1.0, 0.0})}, Vector::Constant(1, 0.4));
  const ConstraintCache cons(ws);
  const Vector y = dist({0.5, 0.4}).probs();
  // Unnormalized violation: 2*0.45 - 2*0.4 = 0.1.

  SUBCASE("grows while violated") {
    const Vector after =
        all::multipliers_step(Vector::Constant(1, 0.5), y, cons, 0.1);
    CHECK(after[0] == doctest::Approx(0.51).epsilon(1e-12));
  }

  SUBCASE("decays toward the hinge on slack and clips at zero") {
    const WeakSignalSet slack_ws({dist({1.0, 0.0})}, Vector::Constant(1, 0.6));
    const ConstraintCache slack_cons(slack_ws);
    // Slack s = 0.15 per example, unnormalized 0.3: gamma drops by rho*0.3.
    const Vector after =
        all::multipliers_step(Vector::Constant(1, 0.5), y, slack_cons, 1.0);
    CHECK(after[0] == doctest::Approx(0.2).epsilon(1e-12));
    const Vector clipped =
        all::multipliers_step(Vector::Constant(1, 0.1), y, slack_cons, 1.0);
    CHECK(clipped[0] == 0.0);
  }
}

TEST_CASE("training the two-example geometry recovers the known optimum") {
  const WeakSignalSet ws = testutil::two_example_fixture();
  const Matrix X = Matrix::Zero(2, 1);
  DirectModel model(2);
  const auto result = all::train(X, ws, model, testutil::fixture_solver_config());
  const Vector p = model.predict(X);

  CHECK(std::abs(p[0] - 0.18) < 0.02);
  CHECK(std::abs(p[1] - 0.0) < 0.02);

  // The inner maximizer at the learned probabilities is the constraint
  // intersection, with both constraints active.
  const auto inner = all::solve_exact(LabelDistribution(p), ws);
  REQUIRE(inner.status == all::OracleStatus::Optimal);
  CHECK(std::abs(inner.labels[0] - 0.41) < 0.02);
  CHECK(std::abs(inner.labels[1] - 0.23) < 0.02);
  const Vector slack = all::feasibility(ws, inner.labels);
  CHECK(std::abs(slack[0]) < 0.01);
  CHECK(std::abs(slack[1]) < 0.01);

  // Projection invariants hold at the end.
  CHECK(result.multipliers.minCoeff() >= 0.0);
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(result.adversarial[j] >= 0.0);
    CHECK(result.adversarial[j] <= 1.0);
  }
}

TEST_CASE("a binary signal with a zero bound forces the truth") {
  // Separable one-dimensional data; the only feasible labeling is the
  // signal itself, so training must reproduce it.
  const Eigen::Index n = 20;
  Matrix X(n, 1);
  Vector labels(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    labels[j] = j < n / 2 ? 0.0 : 1.0;
    X(j, 0) = labels[j] == 1.0 ? 1.5 + 0.05 * static_cast<double>(j)
                               : -1.5 - 0.05 * static_cast<double>(j);
  }
  const WeakSignalSet ws({LabelDistribution(labels)}, Vector::Zero(1));

  all::SigmoidLinearModel model(1);
  SolverConfig cfg;
  const auto result = all::train(X, ws, model, cfg);
  CHECK(result.status != TrainStatus::Infeasible);
  CHECK(all::accuracy(model.predict(X), labels) == doctest::Approx(1.0));
}

TEST_CASE("primal value improves and upper-bounds the true error") {
  // Two-Gaussian synthetic with three weak signals bounded by true errors.
  std::mt19937 gen(97);
  std::normal_distribution<double> noise(0.0, 1.0);
  const Eigen::Index n = 40;
  Matrix X(n, 2);
  Vector truth(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    truth[j] = j % 2 == 0 ? 1.0 : 0.0;
    X(j, 0) = (truth[j] == 1.0 ? 1.0 : -1.0) + noise(gen);
    X(j, 1) = noise(gen);
  }
  const LabelDistribution truth_dist(truth);
  std::vector<LabelDistribution> signals;
  Vector bounds(3);
  for (int i = 0; i < 3; ++i) {
    Vector q(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double flip = noise(gen) > 1.2 ? 1.0 : 0.0;
      q[j] = std::min(1.0, std::max(0.0, std::abs(truth[j] - 0.3 * flip) *
                                             0.9 + 0.05));
    }
    signals.push_back(LabelDistribution(q));
    bounds[i] = all::constraint_value(signals.back(), truth_dist);
  }
  const WeakSignalSet ws(signals, bounds);

  all::SigmoidLinearModel model(2);
  const LabelDistribution p_init(model.predict(X));
  const double primal_init = all::primal_value(p_init, ws);

  SolverConfig cfg;
  all::train(X, ws, model, cfg);
  const LabelDistribution p_final(model.predict(X));
  const double primal_final = all::primal_value(p_final, ws);

  CHECK(primal_final <= primal_init + 1e-9);
  CHECK(primal_final >= all::expected_error(p_final, truth_dist) - 1e-9);
}

TEST_CASE("identical configuration reproduces the trace bit for bit") {
  const WeakSignalSet ws = testutil::two_example_fixture();
  const Matrix X = Matrix::Zero(2, 1);
  SolverConfig cfg = testutil::fixture_solver_config();
  cfg.max_iters = 500;

  DirectModel a(2), b(2);
  const auto ra = all::train(X, ws, a, cfg);
  const auto rb = all::train(X, ws, b, cfg);
  REQUIRE(ra.trace.records.size() == rb.trace.records.size());
  for (size_t i = 0; i < ra.trace.records.size(); ++i) {
    CHECK(ra.trace.records[i].lagrangian == rb.trace.records[i].lagrangian);
    CHECK(ra.trace.records[i].expected_error ==
          rb.trace.records[i].expected_error);
  }
  CHECK((a.params() - b.params()).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("infeasible bounds abort with a diagnostic status") {
  // A signal and its complement cannot both be nearly perfect.
  const Eigen::Index n = 12;
  Vector q(n);
  for (Eigen::Index j = 0; j < n; ++j) q[j] = j % 2 == 0 ? 1.0 : 0.0;
  const WeakSignalSet ws(
      {LabelDistribution(q), LabelDistribution(Vector::Ones(n) - q)},
      Vector::Constant(2, 0.02));
  CHECK_FALSE(all::bounds_feasible(ws));

  Matrix X(n, 1);
  for (Eigen::Index j = 0; j < n; ++j) X(j, 0) = q[j] * 2.0 - 1.0;
  all::SigmoidLinearModel model(1);
  SolverConfig cfg;
  const auto result = all::train(X, ws, model, cfg);
  CHECK(result.status == TrainStatus::Infeasible);
}

TEST_CASE("iteration budget exhaustion is flagged, not hidden") {
  const WeakSignalSet ws = testutil::two_example_fixture();
  const Matrix X = Matrix::Zero(2, 1);
  DirectModel model(2);
  SolverConfig cfg = testutil::fixture_solver_config();
  cfg.max_iters = 5;
  const auto result = all::train(X, ws, model, cfg);
  CHECK(result.status == TrainStatus::IterationLimit);
  CHECK(result.iterations == 5);
  CHECK(result.trace.records.size() == 5);
}

TEST_CASE("trace rows export as CSV") {
  const WeakSignalSet ws = testutil::two_example_fixture();
  const Matrix X = Matrix::Zero(2, 1);
  DirectModel model(2);
  SolverConfig cfg = testutil::fixture_solver_config();
  cfg.max_iters = 3;
  const auto result = all::train(X, ws, model, cfg);

  std::ostringstream out;
  result.trace.write_csv(out);
  const std::string text = out.str();
  CHECK(text.find("iteration,lagrangian,expected_error,max_violation,"
                  "multiplier_inf") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 rows
}

#include "all/experiment.hpp"

#include "doctest.h"
#include "testutil.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using all::Dataset;
using all::GridConfig;
using all::LabelDistribution;
using all::Matrix;
using all::SplitSpec;
using all::Vector;

namespace {

Dataset separable_dataset(Eigen::Index n, unsigned seed, double margin = 2.5) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> noise(0.0, 0.4);
  Dataset d;
  d.features.resize(n, 3);
  d.true_labels = Vector(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double y = j % 2 == 0 ? 1.0 : 0.0;
    (*d.true_labels)[j] = y;
    for (Eigen::Index c = 0; c < 3; ++c) {
      d.features(j, c) = (y == 1.0 ? margin : -margin) + noise(gen);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("shuffled_indices is a deterministic permutation") {
  const auto a = all::shuffled_indices(100, 7);
  const auto b = all::shuffled_indices(100, 7);
  const auto c = all::shuffled_indices(100, 8);
  CHECK(a == b);
  CHECK(a != c);
  std::set<Eigen::Index> seen(a.begin(), a.end());
  CHECK(seen.size() == 100);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 99);
}

TEST_CASE("splits are disjoint, covering, and sized 30/40/30") {
  const Dataset data = separable_dataset(200, 5);
  SplitSpec spec;
  spec.seed = 3;
  const auto split = all::split_dataset(data, spec);
  CHECK(split.ws.n() == 60);
  CHECK(split.train.n() == 80);
  CHECK(split.test.n() == 60);

  std::set<Eigen::Index> rows;
  for (const auto& group : {split.ws_rows, split.train_rows, split.test_rows}) {
    for (const auto r : group) rows.insert(r);
  }
  CHECK(rows.size() == 200);

  const auto again = all::split_dataset(data, spec);
  CHECK(split.train_rows == again.train_rows);

  SplitSpec other = spec;
  other.seed = 4;
  CHECK(all::split_dataset(data, other).train_rows != split.train_rows);
}

TEST_CASE("stratified splits preserve the class ratio") {
  std::mt19937 gen(9);
  Dataset data = separable_dataset(300, 11);
  // Make it imbalanced: 1/3 positives.
  for (Eigen::Index j = 0; j < 300; ++j) {
    (*data.true_labels)[j] = j % 3 == 0 ? 1.0 : 0.0;
  }
  SplitSpec spec;
  spec.stratified = true;
  spec.seed = 2;
  const auto split = all::split_dataset(data, spec);
  const auto rate = [](const Dataset& d) {
    return d.true_labels->sum() / static_cast<double>(d.n());
  };
  CHECK(std::abs(rate(split.ws) - 1.0 / 3.0) < 0.05);
  CHECK(std::abs(rate(split.train) - 1.0 / 3.0) < 0.05);
  CHECK(std::abs(rate(split.test) - 1.0 / 3.0) < 0.05);
}

TEST_CASE("paired t-test outcomes") {
  const std::vector<double> base(10, 0.9);
  CHECK_FALSE(all::paired_ttest_distinguishable(base, base));

  std::vector<double> shifted;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> jitter(-0.005, 0.005);
  for (const double v : base) shifted.push_back(v + 0.1 + jitter(gen));
  CHECK(all::paired_ttest_distinguishable(shifted, base));

  // Hand-computed case: differences with t = 1.63 < 2.262 at df = 9.
  const std::vector<double> d = {0.02, -0.01, 0.03, 0.00, 0.01,
                                 0.02, -0.02, 0.01, 0.00, 0.02};
  std::vector<double> a, b;
  for (const double v : d) {
    a.push_back(0.8 + v);
    b.push_back(0.8);
  }
  CHECK_FALSE(all::paired_ttest_distinguishable(a, b));

  // Constant nonzero difference: zero variance, still distinguishable.
  std::vector<double> c;
  for (const double v : base) c.push_back(v + 0.01);
  CHECK(all::paired_ttest_distinguishable(c, base));
}

TEST_CASE("student t critical values match the tables") {
  // Two-tailed p at the df=9 critical point 2.262 is 0.05.
  CHECK(2.0 * (1.0 - all::student_t_cdf(2.262157, 9)) ==
        doctest::Approx(0.05).epsilon(1e-4));
  // Symmetry and midpoint.
  CHECK(all::student_t_cdf(0.0, 5) == doctest::Approx(0.5));
  CHECK(all::student_t_cdf(-1.3, 7) ==
        doctest::Approx(1.0 - all::student_t_cdf(1.3, 7)).epsilon(1e-12));
  // df=1 is the Cauchy distribution: CDF(1) = 3/4.
  CHECK(all::student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("a grid over truthful signals reaches supervised accuracy everywhere") {
  const Dataset data = separable_dataset(240, 21);
  GridConfig config;
  config.ws_features = {0, 1, 2};
  config.seeds = {0, 1, 2};
  config.jobs = 3;

  const auto rows = all::run_grid(data, config);
  // 4 methods x 3 signal counts.
  CHECK(rows.size() == 12);
  for (const auto& row : rows) {
    CAPTURE(row.method);
    REQUIRE(row.accuracies.size() == 3);
    for (const double acc : row.accuracies) {
      CHECK(acc >= 0.95);
      CHECK(acc <= 1.0);
    }
    CHECK(row.mean >= 0.95);
  }
  // Everything ties at the top, so the whole grid is one significance group.
  for (const auto& row : rows) CHECK(row.best_group);
}

TEST_CASE("solver cells carry convergence flags") {
  const Dataset data = separable_dataset(120, 33);
  GridConfig config;
  config.ws_features = {0};
  config.seeds = {0, 1};
  config.solver.max_iters = 4;  // guaranteed iteration-limit
  config.run_ge = config.run_avg = config.run_ws = false;

  const auto rows = all::run_grid(data, config);
  REQUIRE(rows.size() == 1);
  for (const bool converged : rows[0].converged) CHECK_FALSE(converged);
}

TEST_CASE("dependent study at one copy equals the two-signal grid cells") {
  const auto surrogate = testutil::make_dependent_surrogate(99, 500);
  GridConfig config;
  config.ws_features = {0, 1};
  config.seeds = {0, 1};
  config.jobs = 2;

  const auto grid = all::run_grid(surrogate.data, config);
  const auto curve = all::dependent_error_study(surrogate.data, 0, 1, 2, config);

  const auto find = [&](const std::string& name) {
    for (const auto& row : grid) {
      if (row.method == name) return row.mean;
    }
    FAIL("missing row ", name);
    return 0.0;
  };
  CHECK(curve[0].all_acc == doctest::Approx(find("ALL-2")).epsilon(1e-12));
  CHECK(curve[0].avg_acc == doctest::Approx(find("AVG-2")).epsilon(1e-12));
}

TEST_CASE("repeated copies of a bad signal follow the vote arithmetic") {
  const auto surrogate = testutil::make_dependent_surrogate(2024, 800);
  GridConfig config;
  config.seeds = {0, 1};
  config.jobs = 2;
  const auto curve = all::dependent_error_study(
      surrogate.data, all::SignalSource::feature(0),
      all::SignalSource::fixed(surrogate.bad_signal, "ws-bad"), 4, config);

  // With enough confident copies the rounded average IS the bad signal, so
  // AVG inherits its accuracy while ALL barely moves.
  CHECK(curve.back().avg_acc <= curve.front().avg_acc - 0.10);
  CHECK(std::abs(curve.back().all_acc - curve.front().all_acc) < 0.05);
  CHECK(curve.back().avg_acc < curve.back().ws_bad_acc + 0.10);
}

TEST_CASE("bound sweep flags infeasible points and keeps finite errors") {
  const Dataset data = separable_dataset(200, 55, 1.2);
  GridConfig config;
  config.ws_features = {0, 1, 2};
  config.seeds = {0, 1};
  config.jobs = 2;

  const auto points =
      all::bound_sweep(data, {0.01, 0.3, 0.6, 0.95}, config);
  REQUIRE(points.size() == 4);
  // Soft signals cannot be within 0.01 of any labeling.
  CHECK(points[0].infeasible_splits == 2);
  CHECK_FALSE(points[0].usable());
  for (size_t i = 1; i < points.size(); ++i) {
    CAPTURE(points[i].bound);
    CHECK(points[i].usable());
    CHECK(points[i].mean_error >= 0.0);
    CHECK(points[i].mean_error <= 1.0);
  }
}

TEST_CASE("result tables serialize with significance markers") {
  std::vector<all::ExperimentResult> rows(2);
  rows[0] = {"ALL-1", {0.9, 0.92}, {true, true}, 0.91, false};
  rows[1] = {"AVG-1", {0.7, 0.72}, {true, true}, 0.71, false};
  all::mark_significance_groups(rows);
  CHECK(rows[0].best_group);
  CHECK_FALSE(rows[1].best_group);

  std::ostringstream results, summary, table;
  all::write_results_csv(results, "toy", rows, {0, 1});
  all::write_summary_csv(summary, "toy", rows);
  all::write_table(table, rows);
  CHECK(results.str().find("toy,ALL-1,0,0.9") != std::string::npos);
  CHECK(summary.str().find("toy,ALL-1,") != std::string::npos);
  CHECK(table.str().find('*') != std::string::npos);
}

#include "all/experiment.hpp"

#include "all/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <thread>
#include <tuple>

namespace all {

// ---------------------------------------------------------------------------
// Splits

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, unsigned seed) {
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) idx[static_cast<size_t>(j)] = j;
  // Explicit Fisher-Yates over mt19937 output; std::shuffle is not
  // reproducible across standard libraries.
  std::mt19937 gen(seed);
  for (Eigen::Index j = n - 1; j > 0; --j) {
    const auto r = static_cast<Eigen::Index>(
        gen() % static_cast<unsigned long>(j + 1));
    std::swap(idx[static_cast<size_t>(j)], idx[static_cast<size_t>(r)]);
  }
  return idx;
}

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.d());
  if (data.true_labels) {
    out.true_labels = Vector(static_cast<Eigen::Index>(rows.size()));
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = data.features.row(rows[r]);
    if (data.true_labels) {
      (*out.true_labels)[static_cast<Eigen::Index>(r)] =
          (*data.true_labels)[rows[r]];
    }
    if (!data.ids.empty()) {
      out.ids.push_back(data.ids[static_cast<size_t>(rows[r])]);
    }
  }
  return out;
}

SplitData split_dataset(const Dataset& data, const SplitSpec& spec) {
  spec.validate();
  if (!data.true_labels) {
    throw contract_error("split_dataset: harness requires true labels");
  }
  const Eigen::Index n = data.n();

  std::vector<Eigen::Index> order;
  if (!spec.stratified) {
    order = shuffled_indices(n, spec.seed);
  } else {
    // Shuffle within each class, then interleave by the shuffled global
    // order so the class ratio carries into every split.
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index j = 0; j < n; ++j) {
      ((*data.true_labels)[j] == 1.0 ? pos : neg).push_back(j);
    }
    const auto mix = shuffled_indices(n, spec.seed);
    std::vector<Eigen::Index> pos_sh, neg_sh;
    for (const auto j : mix) {
      ((*data.true_labels)[j] == 1.0 ? pos_sh : neg_sh).push_back(j);
    }
    size_t pi = 0, ni = 0;
    const double rate = static_cast<double>(pos.size()) /
                        static_cast<double>(n);
    double owed = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      owed += rate;
      if ((owed >= 1.0 && pi < pos_sh.size()) || ni >= neg_sh.size()) {
        order.push_back(pos_sh[pi++]);
        owed -= 1.0;
      } else {
        order.push_back(neg_sh[ni++]);
      }
    }
  }

  const auto n_ws = static_cast<Eigen::Index>(
      std::llround(spec.ws_fraction * static_cast<double>(n)));
  const auto n_train = static_cast<Eigen::Index>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  if (n_ws < 1 || n_train < 1 || n_ws + n_train >= n) {
    throw contract_error("split_dataset: dataset too small for the fractions");
  }

  SplitData out;
  out.ws_rows = {order.begin(), order.begin() + n_ws};
  out.train_rows = {order.begin() + n_ws, order.begin() + n_ws + n_train};
  out.test_rows = {order.begin() + n_ws + n_train, order.end()};
  out.ws = subset(data, out.ws_rows);
  out.train = subset(data, out.train_rows);
  out.test = subset(data, out.test_rows);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const bool swap = x > (a + 1.0) / (a + b + 2.0);
  if (swap) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  const double tiny = 1e-300;
  double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  for (int i = 1; i <= 300; ++i) {
    const double m = static_cast<double>(i);
    double numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    d = 1.0 + numerator * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + numerator / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= c * d;

    numerator = -(a + m) * (a + b + m) * x /
                ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    d = 1.0 + numerator * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + numerator / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-14) break;
  }
  return std::exp(ln_front) * f / a;
}

}  // namespace

double student_t_cdf(double t, int df) {
  if (df < 1) throw contract_error("student_t_cdf: df must be >= 1");
  const double v = static_cast<double>(df);
  const double x = v / (v + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * v, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

bool paired_ttest_distinguishable(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  double alpha) {
  if (a.size() != b.size() || a.size() < 2) {
    throw contract_error("paired_ttest: need equal-length samples, n >= 2");
  }
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd == 0.0) return mean != 0.0;  // identical vectors are indistinguishable
  const double t = mean / (sd / std::sqrt(n));
  const double p = 2.0 * (1.0 - student_t_cdf(std::abs(t),
                                              static_cast<int>(a.size()) - 1));
  return p < alpha;
}

// ---------------------------------------------------------------------------
// Per-split machinery

WeakSignalSet SignalBundle::signal_set(size_t k) const {
  if (k == 0 || k > on_train.size()) {
    throw contract_error("signal_set: bad signal count");
  }
  std::vector<LabelDistribution> sig(on_train.begin(),
                                     on_train.begin() + static_cast<long>(k));
  Vector b = bounds.head(static_cast<Eigen::Index>(k));
  std::vector<std::string> nm(names.begin(),
                              names.begin() + static_cast<long>(k));
  return WeakSignalSet(std::move(sig), std::move(b), std::move(nm));
}

SignalBundle simulate_signals(const SplitData& split,
                              const std::vector<int>& features,
                              BoundMode mode, double fixed_bound,
                              const SupervisedConfig& config) {
  if (features.empty()) {
    throw contract_error("simulate_signals: no weak-signal features");
  }
  SignalBundle bundle;
  bundle.bounds.resize(static_cast<Eigen::Index>(features.size()));
  const LabelDistribution train_labels(*split.train.true_labels);
  for (size_t i = 0; i < features.size(); ++i) {
    WeakSignalModel model = fit_weak_signal(split.ws, features[i], config);
    bundle.on_train.push_back(model.signal(split.train.features));
    bundle.on_ws.push_back(model.signal(split.ws.features));
    bundle.names.push_back("WS-" + std::to_string(i + 1));
    bundle.bounds[static_cast<Eigen::Index>(i)] =
        mode == BoundMode::TrueError
            ? true_error_bound(bundle.on_train.back(), train_labels)
            : fixed_bound;
    bundle.models.push_back(std::move(model));
  }
  return bundle;
}

AllRun train_all_classifier(const Matrix& X_raw, const WeakSignalSet& ws,
                            const SolverConfig& config) {
  AllRun run;
  run.classifier.scaler = StandardScaler::fit(X_raw);
  const Matrix X = run.classifier.scaler.transform(X_raw);
  SigmoidLinearModel model(X.cols());
  run.result = train(X, ws, model, config);
  run.classifier.weights = model.params();
  return run;
}

// ---------------------------------------------------------------------------
// Grid

namespace {

struct SplitOutcome {
  // method name -> (accuracy, converged)
  std::vector<std::tuple<std::string, double, bool>> cells;
};

SplitOutcome run_split(const Dataset& data, const GridConfig& config,
                       unsigned seed) {
  SplitSpec spec = config.split;
  spec.seed = seed;
  const SplitData split = split_dataset(data, spec);
  const SignalBundle bundle =
      simulate_signals(split, config.ws_features, config.bound_mode,
                       config.fixed_bound, config.supervised);
  const Vector& test_labels = *split.test.true_labels;

  SplitOutcome out;
  const size_t m = config.ws_features.size();
  for (size_t k = 1; k <= m; ++k) {
    const std::string suffix = "-" + std::to_string(k);
    if (config.run_all) {
      const WeakSignalSet ws_k = bundle.signal_set(k);
      const AllRun run =
          train_all_classifier(split.train.features, ws_k, config.solver);
      const double acc = accuracy(
          run.classifier.predict_proba(split.test.features), test_labels);
      out.cells.emplace_back("ALL" + suffix, acc,
                             run.result.status == TrainStatus::Converged);
    }
    if (config.run_ge) {
      const std::vector<LabelDistribution> sig_train(
          bundle.on_train.begin(),
          bundle.on_train.begin() + static_cast<long>(k));
      const std::vector<LabelDistribution> sig_ws(
          bundle.on_ws.begin(), bundle.on_ws.begin() + static_cast<long>(k));
      const auto refs =
          reference_distributions(sig_ws, *split.ws.true_labels);
      const LinearClassifier ge = train_ge(split.train.features, sig_train,
                                           refs, config.supervised);
      out.cells.emplace_back(
          "GE" + suffix,
          accuracy(ge.predict_proba(split.test.features), test_labels), true);
    }
    if (config.run_avg) {
      const LinearClassifier avg = train_avg(
          split.train.features, bundle.signal_set(k), config.supervised);
      out.cells.emplace_back(
          "AVG" + suffix,
          accuracy(avg.predict_proba(split.test.features), test_labels), true);
    }
    if (config.run_ws) {
      const LabelDistribution q_test =
          bundle.models[k - 1].signal(split.test.features);
      out.cells.emplace_back("WS" + suffix,
                             accuracy(q_test.probs(), test_labels), true);
    }
  }
  return out;
}

void parallel_over_splits(size_t count, int jobs,
                          const std::function<void(size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (size_t s = 0; s < count; ++s) body(s);
    return;
  }
  std::atomic<size_t> next{0};
  const int workers =
      std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t s = next.fetch_add(1);
        if (s >= count) return;
        body(s);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<ExperimentResult> run_grid(const Dataset& data,
                                       const GridConfig& config) {
  if (config.seeds.empty()) throw contract_error("run_grid: no split seeds");
  std::vector<SplitOutcome> outcomes(config.seeds.size());
  parallel_over_splits(config.seeds.size(), config.jobs, [&](size_t s) {
    outcomes[s] = run_split(data, config, config.seeds[s]);
  });

  // Method order follows the first split's cell order.
  std::vector<ExperimentResult> rows;
  std::map<std::string, size_t> index;
  for (const auto& outcome : outcomes) {
    for (const auto& [name, acc, conv] : outcome.cells) {
      auto it = index.find(name);
      if (it == index.end()) {
        index.emplace(name, rows.size());
        rows.push_back({name, {}, {}, 0.0, false});
        it = index.find(name);
      }
      rows[it->second].accuracies.push_back(acc);
      rows[it->second].converged.push_back(conv);
    }
  }
  for (auto& row : rows) {
    double sum = 0.0;
    for (const double a : row.accuracies) sum += a;
    row.mean = sum / static_cast<double>(row.accuracies.size());
  }
  mark_significance_groups(rows);
  return rows;
}

void mark_significance_groups(std::vector<ExperimentResult>& rows,
                              double alpha) {
  if (rows.empty()) return;
  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean > rows[best].mean) best = i;
  }
  for (auto& row : rows) {
    row.best_group =
        row.accuracies.size() < 2 ||
        !paired_ttest_distinguishable(row.accuracies, rows[best].accuracies,
                                      alpha);
  }
}

// ---------------------------------------------------------------------------
// Studies

SignalSource SignalSource::feature(int index) {
  SignalSource s;
  s.feature_index_ = index;
  s.name_ = "f" + std::to_string(index);
  return s;
}

SignalSource SignalSource::fixed(LabelDistribution dataset_wide,
                                 std::string name) {
  SignalSource s;
  s.fixed_ = std::move(dataset_wide);
  s.name_ = std::move(name);
  return s;
}

SignalSource::PerSplit SignalSource::realize(
    const SplitData& split, const SupervisedConfig& config) const {
  PerSplit out;
  out.name = name_;
  if (feature_index_ >= 0) {
    const WeakSignalModel model =
        fit_weak_signal(split.ws, feature_index_, config);
    out.on_ws = model.signal(split.ws.features);
    out.on_train = model.signal(split.train.features);
    out.on_test = model.signal(split.test.features);
    return out;
  }
  const auto slice = [&](const std::vector<Eigen::Index>& rows) {
    Vector q(static_cast<Eigen::Index>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j) {
      q[static_cast<Eigen::Index>(j)] = fixed_[rows[j]];
    }
    return LabelDistribution(q);
  };
  out.on_ws = slice(split.ws_rows);
  out.on_train = slice(split.train_rows);
  out.on_test = slice(split.test_rows);
  return out;
}

std::vector<DependentCurvePoint> dependent_error_study(const Dataset& data,
                                                       const SignalSource& good,
                                                       const SignalSource& bad,
                                                       int max_copies,
                                                       GridConfig config) {
  if (max_copies < 1) throw contract_error("dependent_error_study: max_copies");
  std::vector<DependentCurvePoint> curve(static_cast<size_t>(max_copies));
  for (int k = 0; k < max_copies; ++k) curve[static_cast<size_t>(k)].copies = k + 1;

  std::vector<std::vector<DependentCurvePoint>> per_split(config.seeds.size());
  parallel_over_splits(config.seeds.size(), config.jobs, [&](size_t s) {
    SplitSpec spec = config.split;
    spec.seed = config.seeds[s];
    const SplitData split = split_dataset(data, spec);
    const auto good_sig = good.realize(split, config.supervised);
    const auto bad_sig = bad.realize(split, config.supervised);
    const LabelDistribution train_labels(*split.train.true_labels);
    const Vector& test_labels = *split.test.true_labels;

    const double good_bound =
        config.bound_mode == BoundMode::TrueError
            ? true_error_bound(good_sig.on_train, train_labels)
            : config.fixed_bound;
    const double bad_bound =
        config.bound_mode == BoundMode::TrueError
            ? true_error_bound(bad_sig.on_train, train_labels)
            : config.fixed_bound;

    std::vector<DependentCurvePoint> points;
    for (int copies = 1; copies <= max_copies; ++copies) {
      std::vector<LabelDistribution> sig_train{good_sig.on_train};
      Vector bounds(copies + 1);
      bounds[0] = good_bound;
      for (int c = 0; c < copies; ++c) {
        sig_train.push_back(bad_sig.on_train);
        bounds[c + 1] = bad_bound;
      }
      const WeakSignalSet ws_set(sig_train, bounds);

      DependentCurvePoint point;
      point.copies = copies;
      point.ws_good_acc = accuracy(good_sig.on_test.probs(), test_labels);
      point.ws_bad_acc = accuracy(bad_sig.on_test.probs(), test_labels);

      const AllRun run =
          train_all_classifier(split.train.features, ws_set, config.solver);
      point.all_acc = accuracy(
          run.classifier.predict_proba(split.test.features), test_labels);

      // Dependent-error regime: references come from the signals' own aggregate
      // labeling on the unlabeled training split, so dependent copies
      // poison them.
      const auto refs = pseudo_reference_distributions(sig_train);
      const LinearClassifier ge =
          train_ge(split.train.features, sig_train, refs, config.supervised);
      point.ge_acc =
          accuracy(ge.predict_proba(split.test.features), test_labels);

      const LinearClassifier avg =
          train_avg(split.train.features, ws_set, config.supervised);
      point.avg_acc =
          accuracy(avg.predict_proba(split.test.features), test_labels);

      points.push_back(point);
    }
    per_split[s] = std::move(points);
  });

  const double ns = static_cast<double>(config.seeds.size());
  for (const auto& points : per_split) {
    for (size_t k = 0; k < points.size(); ++k) {
      curve[k].all_acc += points[k].all_acc / ns;
      curve[k].ge_acc += points[k].ge_acc / ns;
      curve[k].avg_acc += points[k].avg_acc / ns;
      curve[k].ws_good_acc += points[k].ws_good_acc / ns;
      curve[k].ws_bad_acc += points[k].ws_bad_acc / ns;
    }
  }
  return curve;
}

std::vector<SweepPoint> bound_sweep(const Dataset& data,
                                    const std::vector<double>& bounds,
                                    GridConfig config) {
  config.bound_mode = BoundMode::Fixed;
  std::vector<SweepPoint> points;
  points.reserve(bounds.size());

  for (const double b : bounds) {
    if (!(b > 0.0 && b < 1.0)) {
      throw contract_error("bound_sweep: bounds must lie in (0,1)");
    }
    SweepPoint point;
    point.bound = b;
    point.total_splits = static_cast<int>(config.seeds.size());

    std::vector<double> errors(config.seeds.size(),
                               std::numeric_limits<double>::quiet_NaN());
    parallel_over_splits(config.seeds.size(), config.jobs, [&](size_t s) {
      SplitSpec spec = config.split;
      spec.seed = config.seeds[s];
      const SplitData split = split_dataset(data, spec);
      const SignalBundle bundle =
          simulate_signals(split, config.ws_features, BoundMode::Fixed, b,
                           config.supervised);
      const WeakSignalSet ws_set = bundle.signal_set(config.ws_features.size());

      if (split.train.n() <= config.feasibility_check_limit &&
          !bounds_feasible(ws_set)) {
        return;  // leave NaN: infeasible split
      }
      const AllRun run =
          train_all_classifier(split.train.features, ws_set, config.solver);
      if (run.result.status == TrainStatus::Infeasible) return;
      errors[s] = 1.0 - accuracy(run.classifier.predict_proba(
                                     split.test.features),
                                 *split.test.true_labels);
    });

    double sum = 0.0;
    int usable = 0;
    for (const double e : errors) {
      if (std::isnan(e)) {
        ++point.infeasible_splits;
      } else {
        sum += e;
        ++usable;
      }
    }
    point.mean_error = usable > 0 ? sum / usable : 0.0;
    points.push_back(point);
  }
  return points;
}

// ---------------------------------------------------------------------------
// Output

void write_results_csv(std::ostream& out, const std::string& dataset,
                       const std::vector<ExperimentResult>& rows,
                       const std::vector<unsigned>& seeds) {
  out << "dataset,method,split_seed,accuracy,converged\n";
  for (const auto& row : rows) {
    for (size_t s = 0; s < row.accuracies.size(); ++s) {
      out << dataset << ',' << row.method << ',' << seeds[s] << ','
          << std::setprecision(17) << row.accuracies[s] << ','
          << (row.converged[s] ? 1 : 0) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::string& dataset,
                       const std::vector<ExperimentResult>& rows) {
  out << "dataset,method,mean,significance_group\n";
  for (const auto& row : rows) {
    out << dataset << ',' << row.method << ',' << std::setprecision(17)
        << row.mean << ',' << (row.best_group ? 1 : 0) << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<ExperimentResult>& rows) {
  size_t width = 8;
  for (const auto& row : rows) width = std::max(width, row.method.size() + 2);
  for (const auto& row : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row.method
        << std::right << std::fixed << std::setprecision(3) << row.mean
        << (row.best_group ? "  *" : "") << '\n';
  }
  out.unsetf(std::ios::fixed);
}

}  // namespace all

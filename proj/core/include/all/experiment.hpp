// Evaluation protocol: 30/40/30 weak-supervision/train/test splits over a
// fixed seed list, the ALL-k / GE-k / AVG-k / WS-k method grid, paired
// t-test significance grouping, the dependent-error study, and the
// fixed-bound sweep.
//
// The harness holds the hidden true labels; learners only ever see features,
// weak signals, and bounds.

#pragma once

#include "all/baselines.hpp"
#include "all/models.hpp"
#include "all/solver.hpp"
#include "all/types.hpp"
#include "all/weak_supervision.hpp"

#include <iosfwd>

namespace all {

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
  double ws_fraction = 0.30;
  double train_fraction = 0.40;  // the test split takes the remainder
  unsigned seed = 0;
  bool stratified = false;

  void validate() const {
    if (!(ws_fraction > 0.0 && train_fraction > 0.0 &&
          ws_fraction + train_fraction < 1.0)) {
      throw contract_error("SplitSpec: fractions must be positive and sum below 1");
    }
  }
};

struct SplitData {
  Dataset ws;
  Dataset train;
  Dataset test;
  // Original row indices of each split, for dataset-wide signal slicing.
  std::vector<Eigen::Index> ws_rows, train_rows, test_rows;
};

// Deterministic Fisher-Yates permutation; stable across platforms.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, unsigned seed);

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows);

// Disjoint covering split. Requires true labels (the harness needs them for
// signal simulation, bounds, and scoring).
SplitData split_dataset(const Dataset& data, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Statistics

// Two-tailed paired t-test at level alpha; true means the two accuracy
// vectors are statistically distinguishable. Zero-variance differences are
// indistinguishable iff every difference is zero.
bool paired_ttest_distinguishable(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  double alpha = 0.05);

// P(T <= t) for Student's t with df degrees of freedom.
double student_t_cdf(double t, int df);

// ---------------------------------------------------------------------------
// Method grid

enum class BoundMode { TrueError, Fixed };

struct GridConfig {
  std::vector<int> ws_features;  // one feature column per weak signal
  BoundMode bound_mode = BoundMode::TrueError;
  double fixed_bound = 0.3;
  std::vector<unsigned> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  SplitSpec split;
  SolverConfig solver;
  SupervisedConfig supervised;  // weak signals, AVG targets, GE optimizer
  bool run_all = true;
  bool run_ge = true;
  bool run_avg = true;
  bool run_ws = true;
  int jobs = 1;

  // Exact LP feasibility pre-check is skipped above this many train rows
  // (the tableau is dense); the solver's runtime heuristic still applies.
  Eigen::Index feasibility_check_limit = 600;
};

struct ExperimentResult {
  std::string method;              // e.g. "ALL-3"
  std::vector<double> accuracies;  // one per split seed
  std::vector<bool> converged;     // solver cells may be flagged
  double mean = 0.0;
  bool best_group = false;  // not distinguishable from the best method
};

std::vector<ExperimentResult> run_grid(const Dataset& data,
                                       const GridConfig& config);

// Marks every row whose accuracies are indistinguishable from the best mean.
void mark_significance_groups(std::vector<ExperimentResult>& rows,
                              double alpha = 0.05);

// ---------------------------------------------------------------------------
// Studies

// A weak-signal generator for the studies: either a one-dimensional model
// fitted on the weak-supervision split, or a fixed dataset-wide soft
// labeling sliced per split (used to inject hand-built signals).
class SignalSource {
 public:
  static SignalSource feature(int index);
  static SignalSource fixed(LabelDistribution dataset_wide, std::string name);

  // Returns (q_ws, q_train, q_test) for one split.
  struct PerSplit {
    LabelDistribution on_ws, on_train, on_test;
    std::string name;
  };
  PerSplit realize(const SplitData& split, const SupervisedConfig& config) const;

 private:
  int feature_index_ = -1;
  LabelDistribution fixed_;
  std::string name_;
};

// One good signal plus k identical copies of a bad one, k = 1..max_copies.
struct DependentCurvePoint {
  int copies = 0;
  double all_acc = 0.0;
  double ge_acc = 0.0;
  double avg_acc = 0.0;
  double ws_good_acc = 0.0;
  double ws_bad_acc = 0.0;
};

std::vector<DependentCurvePoint> dependent_error_study(const Dataset& data,
                                                       const SignalSource& good,
                                                       const SignalSource& bad,
                                                       int max_copies,
                                                       GridConfig config);

inline std::vector<DependentCurvePoint> dependent_error_study(
    const Dataset& data, int good_feature, int bad_feature, int max_copies,
    GridConfig config) {
  return dependent_error_study(data, SignalSource::feature(good_feature),
                               SignalSource::feature(bad_feature), max_copies,
                               std::move(config));
}

// ALL error as a function of a shared fixed bound; infeasible points are
// data, not failures.
struct SweepPoint {
  double bound = 0.0;
  double mean_error = 0.0;   // over splits that trained
  int infeasible_splits = 0;
  int total_splits = 0;
  bool usable() const { return infeasible_splits < total_splits; }
};

std::vector<SweepPoint> bound_sweep(const Dataset& data,
                                    const std::vector<double>& bounds,
                                    GridConfig config);

// ---------------------------------------------------------------------------
// Per-split method runners (shared by the grid, the studies, and the CLI)

struct SignalBundle {
  std::vector<WeakSignalModel> models;
  std::vector<LabelDistribution> on_train;
  std::vector<LabelDistribution> on_ws;
  Vector bounds;  // per bound_mode
  std::vector<std::string> names;

  WeakSignalSet signal_set(size_t k) const;  // first k signals
};

SignalBundle simulate_signals(const SplitData& split,
                              const std::vector<int>& features,
                              BoundMode mode, double fixed_bound,
                              const SupervisedConfig& config);

struct AllRun {
  LinearClassifier classifier;
  TrainResult result;
};

// Standardizes the training features, trains the sigmoid-linear model with
// the saddle-point solver, and bundles the scaler into the classifier.
AllRun train_all_classifier(const Matrix& X_raw, const WeakSignalSet& ws,
                            const SolverConfig& config);

// ---------------------------------------------------------------------------
// Output

void write_results_csv(std::ostream& out, const std::string& dataset,
                       const std::vector<ExperimentResult>& rows,
                       const std::vector<unsigned>& seeds);
void write_summary_csv(std::ostream& out, const std::string& dataset,
                       const std::vector<ExperimentResult>& rows);
// Aligned text table, one row per method; best group flagged with '*'.
void write_table(std::ostream& out, const std::vector<ExperimentResult>& rows);

}  // namespace all

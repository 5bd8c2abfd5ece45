// Simulated domain expertise: one-dimensional logistic models fitted on a
// labeled weak-supervision split, evaluated elsewhere to produce soft weak
// signals, plus their error-bound arithmetic.

#pragma once

#include "all/models.hpp"
#include "all/types.hpp"

namespace all {

// A weak signal generator: a single-feature logistic classifier. Signals stay
// soft (raw probabilities); thresholding happens only when scoring.
struct WeakSignalModel {
  int feature_index = 0;
  std::string name;
  LinearClassifier classifier;

  // Soft labeling of any split, using only the stored feature column.
  LabelDistribution signal(const Matrix& X) const;
};

// Fits the one-dimensional model on the weak-supervision split, which must
// carry true labels. A constant feature produces a prior-only signal and a
// warning on stderr, not a failure.
WeakSignalModel fit_weak_signal(const Dataset& ws_split, int feature_index,
                                const SupervisedConfig& config = {});

// Convenience form: fit on ws_split, evaluate on train_split.
LabelDistribution make_weak_signal(const Dataset& ws_split,
                                   const Dataset& train_split,
                                   int feature_index,
                                   const SupervisedConfig& config = {});

// The signal's expected error against known labels; used as the bound b when
// running with true bounds. Same arithmetic as constraint_value.
double true_error_bound(const LabelDistribution& q,
                        const LabelDistribution& labels);

// Constant bound vector (the fixed-bound experiments use 0.3).
Vector fixed_bounds(Eigen::Index m, double value);

}  // namespace all

// Comparison methods: supervised training on averaged pseudo-labels (AVG)
// and a modified generalized-expectation criterion (GE) that matches the
// model's label distribution conditioned on each thresholded weak signal to
// reference distributions via Bernoulli KL divergence.

#pragma once

#include "all/models.hpp"
#include "all/types.hpp"

namespace all {

// Elementwise mean of the signals rounded to {0,1}; ties at exactly 0.5 go to
// the positive class.
LabelDistribution avg_pseudolabels(const WeakSignalSet& ws);

// Logistic regression on the averaged pseudo-labels.
LinearClassifier train_avg(const Matrix& X_raw, const WeakSignalSet& ws,
                           const SupervisedConfig& config = {});

// Reference label distribution for one weak signal: Bernoulli parameters of
// the labels conditioned on q_k >= 0.5 and on q_k < 0.5, with branch counts.
struct ConditionalReference {
  double high = 0.0;            // p~(y | q_k >= 0.5)
  double low = 0.0;             // p~(y | q_k < 0.5)
  Eigen::Index high_count = 0;  // C_k
  Eigen::Index low_count = 0;   // n - C_k
};

// References computed where labels exist (the weak-supervision split in the
// simulation). Soft labels are accepted; the branch mean is taken either way.
std::vector<ConditionalReference> reference_distributions(
    const std::vector<LabelDistribution>& signals, const Vector& labels);

// References computed on an unlabeled split: the label expectation is taken
// over the signals' own mean soft labeling. Redundant copies of a bad signal
// therefore pollute every reference, which is what drives GE's collapse in
// the dependent-error study.
std::vector<ConditionalReference> pseudo_reference_distributions(
    const std::vector<LabelDistribution>& signals);

// Mean of the predictions over one branch of a thresholded signal.
// high_branch selects q_k >= 0.5. Throws on an empty branch; the objective
// skips empty branches instead of calling this.
double model_conditional(const Vector& p, const LabelDistribution& q_k,
                         bool high_branch);

// KL[ref || model] for Bernoulli parameters, both clamped to
// [kGeClampEps, 1 - kGeClampEps].
inline constexpr double kGeClampEps = 1e-6;
double bernoulli_kl(double ref, double model);

// The KL data term: sum over signals and non-empty branches of
// KL[p~ || p^(p)]. The trainer adds the L2 penalty on the weights.
double ge_objective(const Vector& p,
                    const std::vector<LabelDistribution>& signals,
                    const std::vector<ConditionalReference>& refs);

// Gradient-based minimization of the GE objective plus (l2/2)|w|^2 for a
// sigmoid-linear model over the given (raw) features.
LinearClassifier train_ge(const Matrix& X_raw,
                          const std::vector<LabelDistribution>& signals,
                          const std::vector<ConditionalReference>& refs,
                          const SupervisedConfig& config = {});

// Gradient of the full GE loss (KL term + L2) in weight space; exposed for
// finite-difference checking. X is standardized, weights include the bias.
Vector ge_loss_gradient(const Vector& weights, const Matrix& X,
                        const std::vector<LabelDistribution>& signals,
                        const std::vector<ConditionalReference>& refs,
                        double l2_strength);
double ge_loss(const Vector& weights, const Matrix& X,
               const std::vector<LabelDistribution>& signals,
               const std::vector<ConditionalReference>& refs,
               double l2_strength);

}  // namespace all

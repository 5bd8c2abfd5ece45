// Parameterized probabilistic classifiers with analytic transpose-Jacobian
// products, plus a full-batch supervised logistic-regression trainer.
//
// The sigmoid-linear model appends a constant-1 feature internally, so its
// parameter vector has d+1 entries with the bias last. All training entry
// points standardize features (zero mean / unit variance, statistics from the
// fitting split); the saved classifier carries the scaling statistics so raw
// features can be fed to predict_proba.

#pragma once

#include "all/types.hpp"

#include <iosfwd>
#include <memory>

namespace all {

// Numerically stable logistic function, strictly inside (0,1) for finite x.
double sigmoid(double x);
Vector sigmoid(const Vector& x);

// Per-column standardization. Constant columns get unit scale so transformed
// features are zero there instead of NaN.
struct StandardScaler {
  Vector mean;
  Vector scale;

  static StandardScaler fit(const Matrix& X);
  Matrix transform(const Matrix& X) const;
};

// Interface the saddle-point solver trains against: predictions over a fixed
// feature matrix and the transpose-Jacobian product (dp/dtheta)' v.
class ParamModel {
 public:
  virtual ~ParamModel() = default;

  virtual Eigen::Index param_count() const = 0;
  virtual const Vector& params() const = 0;
  virtual void set_params(const Vector& theta) = 0;

  virtual Vector predict(const Matrix& X) const = 0;
  virtual Vector jacobian_vector_product(const Matrix& X,
                                         const Vector& v) const = 0;
};

// p_j = sigmoid(theta' [x_j; 1]); dp_j/dtheta = p_j (1-p_j) [x_j; 1].
class SigmoidLinearModel final : public ParamModel {
 public:
  explicit SigmoidLinearModel(Eigen::Index d)
      : weights_(Vector::Zero(d + 1)) {}
  explicit SigmoidLinearModel(Vector weights) : weights_(std::move(weights)) {}

  Eigen::Index param_count() const override { return weights_.size(); }
  const Vector& params() const override { return weights_; }
  void set_params(const Vector& theta) override;

  Vector predict(const Matrix& X) const override;
  Vector jacobian_vector_product(const Matrix& X,
                                 const Vector& v) const override;

 private:
  Vector weights_;  // d feature weights followed by the bias
};

// One free logit per example; predictions ignore the features except for the
// row count. Used where the optimization is over the learned probabilities
// directly (two-example fixtures, inner-solver tests).
class DirectModel final : public ParamModel {
 public:
  explicit DirectModel(Eigen::Index n) : logits_(Vector::Zero(n)) {}
  explicit DirectModel(Vector logits) : logits_(std::move(logits)) {}

  Eigen::Index param_count() const override { return logits_.size(); }
  const Vector& params() const override { return logits_; }
  void set_params(const Vector& theta) override;

  Vector predict(const Matrix& X) const override;
  Vector jacobian_vector_product(const Matrix& X,
                                 const Vector& v) const override;

 private:
  Vector logits_;
};

struct SupervisedConfig {
  double step_size = 0.1;
  double l2_strength = 1e-4;
  int max_iters = 5000;
  double grad_tol = 1e-6;  // stop when the gradient infinity-norm drops below
};

class training_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full-batch gradient descent on L2-regularized cross-entropy. Targets may be
// soft. X must already be standardized; the bias column is appended
// internally. Returns the d+1 weight vector.
Vector fit_logistic(const Matrix& X, const Vector& targets,
                    const SupervisedConfig& config = {});

// A deployable classifier: weights plus the scaling statistics of the split
// it was fitted on. predict_proba accepts raw (unscaled) features.
struct LinearClassifier {
  Vector weights;        // d+1, bias last
  StandardScaler scaler;

  Vector predict_proba(const Matrix& X_raw) const;

  void save(std::ostream& out) const;
  static LinearClassifier load(std::istream& in);
  void save_file(const std::string& path) const;
  static LinearClassifier load_file(const std::string& path);
};

// Standardizes, fits, and bundles the scaler with the weights.
LinearClassifier fit_supervised(const Matrix& X_raw, const Vector& targets,
                                const SupervisedConfig& config = {});

// Fraction of examples whose 0.5-thresholded prediction matches the binary
// label (ties round up to the positive class).
double accuracy(const Vector& probs, const Vector& labels);

}  // namespace all

// Core domain types for adversarial label learning: datasets, probabilistic
// labelings, weak supervision signals with error bounds, and the bilinear
// expected-error arithmetic every other component is built from.
//
// Labels use the {0,1} convention throughout. A probabilistic labeling is a
// vector in [0,1]^n whose j-th entry is the probability that example j is
// positive.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace all {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown when an argument breaks a documented precondition (length mismatch,
// out-of-range probability, non-finite value).
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Probability that entries may lie outside [0,1] and still be accepted;
// anything within this tolerance is clamped, anything beyond is rejected.
inline constexpr double kProbTolerance = 1e-9;

// A vector of independent Bernoulli parameters over the n examples.
// Used both for adversarial labels and for a model's predicted probabilities;
// the two roles are distinguished by the operation consuming them.
class LabelDistribution {
 public:
  LabelDistribution() = default;

  explicit LabelDistribution(Vector probs) : probs_(std::move(probs)) {
    for (Eigen::Index j = 0; j < probs_.size(); ++j) {
      const double v = probs_[j];
      if (!std::isfinite(v)) {
        throw contract_error("LabelDistribution: non-finite entry at index " +
                             std::to_string(j));
      }
      if (v < -kProbTolerance || v > 1.0 + kProbTolerance) {
        throw contract_error("LabelDistribution: entry " + std::to_string(v) +
                             " at index " + std::to_string(j) +
                             " outside [0,1]");
      }
      probs_[j] = std::min(1.0, std::max(0.0, v));
    }
  }

  const Vector& probs() const { return probs_; }
  Eigen::Index size() const { return probs_.size(); }
  double operator[](Eigen::Index j) const { return probs_[j]; }

  // Elementwise complement 1 - p.
  LabelDistribution complement() const {
    return LabelDistribution(Vector::Ones(probs_.size()) - probs_);
  }

 private:
  Vector probs_;
};

// Feature matrix plus optional hidden ground truth. The true labels are held
// by the experiment harness only; learners never read them.
struct Dataset {
  Matrix features;                        // n rows (examples) x d columns
  std::optional<Vector> true_labels;      // entries in {0,1} when present
  std::vector<std::string> ids;           // optional row identifiers

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }

  void validate() const {
    if (!features.allFinite()) {
      throw contract_error("Dataset: non-finite feature entry");
    }
    if (true_labels) {
      if (true_labels->size() != features.rows()) {
        throw contract_error("Dataset: true_labels length " +
                             std::to_string(true_labels->size()) +
                             " != n = " + std::to_string(features.rows()));
      }
      for (Eigen::Index j = 0; j < true_labels->size(); ++j) {
        const double y = (*true_labels)[j];
        if (y != 0.0 && y != 1.0) {
          throw contract_error("Dataset: true label at index " +
                               std::to_string(j) + " not in {0,1}");
        }
      }
    }
    if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != n()) {
      throw contract_error("Dataset: ids length != n");
    }
  }
};

// m weak signals q_i in [0,1]^n with their expected-error bounds b_i.
// m = 0 is permitted (an unconstrained adversary, used by diagnostics);
// training requires m >= 1.
class WeakSignalSet {
 public:
  WeakSignalSet() = default;

  // An empty names list is filled in as q1, q2, ...
  WeakSignalSet(std::vector<LabelDistribution> signals, Vector bounds,
                std::vector<std::string> names = {})
      : signals_(std::move(signals)),
        bounds_(std::move(bounds)),
        names_(std::move(names)) {
    const auto m = static_cast<Eigen::Index>(signals_.size());
    if (names_.empty()) names_ = default_names(static_cast<size_t>(m));
    if (bounds_.size() != m ||
        static_cast<Eigen::Index>(names_.size()) != m) {
      throw contract_error("WeakSignalSet: signals, bounds, names differ in length");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (signals_[static_cast<size_t>(i)].size() != n()) {
        throw contract_error("WeakSignalSet: signal " + std::to_string(i) +
                             " has mismatched length");
      }
      if (!(bounds_[i] >= 0.0 && bounds_[i] <= 1.0)) {
        throw contract_error("WeakSignalSet: bound " + std::to_string(i) +
                             " outside [0,1]");
      }
    }
  }

  Eigen::Index m() const { return static_cast<Eigen::Index>(signals_.size()); }
  Eigen::Index n() const {
    return signals_.empty() ? 0 : signals_.front().size();
  }
  bool empty() const { return signals_.empty(); }

  const LabelDistribution& signal(Eigen::Index i) const {
    return signals_[static_cast<size_t>(i)];
  }
  const std::vector<LabelDistribution>& signals() const { return signals_; }
  const Vector& bounds() const { return bounds_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  static std::vector<std::string> default_names(size_t m) {
    std::vector<std::string> names;
    names.reserve(m);
    for (size_t i = 0; i < m; ++i) names.push_back("q" + std::to_string(i + 1));
    return names;
  }

  std::vector<LabelDistribution> signals_;
  Vector bounds_;
  std::vector<std::string> names_;
};

// Joint state of the saddle-point optimization: classifier parameters theta,
// KKT multipliers gamma (>= 0 elementwise), and the adversary's labeling.
struct ModelState {
  Vector params;
  Vector multipliers;
  LabelDistribution adversarial;
};

namespace detail {

// Unchecked bilinear disagreement (1/n)(a'(1-b) + (1-a)'b); hot-path form.
inline double disagreement(const Vector& a, const Vector& b) {
  const auto n = static_cast<double>(a.size());
  return (a.dot(Vector::Ones(a.size()) - b) +
          (Vector::Ones(a.size()) - a).dot(b)) /
         n;
}

inline void require_same_length(const LabelDistribution& a,
                                const LabelDistribution& b,
                                const char* op) {
  if (a.size() != b.size() || a.size() == 0) {
    throw contract_error(std::string(op) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

}  // namespace detail

// Expected disagreement rate between two independent probabilistic labelings:
// (1/n)(p'(1-y) + (1-p)'y). Symmetric, lies in [0,1], and reduces to the
// Hamming disagreement rate when both arguments are binary.
inline double expected_error(const LabelDistribution& p,
                             const LabelDistribution& y) {
  detail::require_same_length(p, y, "expected_error");
  return detail::disagreement(p.probs(), y.probs());
}

// Expected error of weak signal q against the labeling y. Constraint i of a
// weak signal set is satisfied iff constraint_value(q_i, y) <= b_i.
inline double constraint_value(const LabelDistribution& q,
                               const LabelDistribution& y) {
  detail::require_same_length(q, y, "constraint_value");
  return detail::disagreement(q.probs(), y.probs());
}

// Per-constraint slack b_i - constraint_value(q_i, y). The labeling y is
// feasible iff every entry is >= 0.
inline Vector feasibility(const WeakSignalSet& ws, const LabelDistribution& y) {
  Vector slack(ws.m());
  for (Eigen::Index i = 0; i < ws.m(); ++i) {
    slack[i] = ws.bounds()[i] - constraint_value(ws.signal(i), y);
  }
  return slack;
}

}  // namespace all

#include "all/baselines.hpp"

#include <cmath>

namespace all {
namespace {

double clamp_prob(double v) {
  return std::min(1.0 - kGeClampEps, std::max(kGeClampEps, v));
}

Matrix with_bias(const Matrix& X) {
  Matrix Xb(X.rows(), X.cols() + 1);
  Xb.leftCols(X.cols()) = X;
  Xb.col(X.cols()).setOnes();
  return Xb;
}

// Branch membership per signal, fixed across the optimization.
struct Branch {
  std::vector<Eigen::Index> members;
  double ref = 0.0;
  bool active = false;  // both the branch and its reference are non-empty
};

std::vector<Branch> build_branches(
    const std::vector<LabelDistribution>& signals,
    const std::vector<ConditionalReference>& refs) {
  if (signals.size() != refs.size()) {
    throw contract_error("ge: signals and references differ in count");
  }
  std::vector<Branch> branches;
  branches.reserve(signals.size() * 2);
  for (size_t k = 0; k < signals.size(); ++k) {
    const Vector& q = signals[k].probs();
    Branch high, low;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      (q[j] >= 0.5 ? high : low).members.push_back(j);
    }
    high.ref = refs[k].high;
    low.ref = refs[k].low;
    high.active = !high.members.empty() && refs[k].high_count > 0;
    low.active = !low.members.empty() && refs[k].low_count > 0;
    branches.push_back(std::move(high));
    branches.push_back(std::move(low));
  }
  return branches;
}

double branch_mean(const Vector& p, const std::vector<Eigen::Index>& members) {
  double sum = 0.0;
  for (const Eigen::Index j : members) sum += p[j];
  return sum / static_cast<double>(members.size());
}

}  // namespace

LabelDistribution avg_pseudolabels(const WeakSignalSet& ws) {
  if (ws.m() == 0) throw contract_error("avg_pseudolabels: no signals");
  Vector mean = Vector::Zero(ws.n());
  for (Eigen::Index i = 0; i < ws.m(); ++i) mean += ws.signal(i).probs();
  mean /= static_cast<double>(ws.m());
  Vector rounded(mean.size());
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    rounded[j] = mean[j] >= 0.5 ? 1.0 : 0.0;
  }
  return LabelDistribution(rounded);
}

LinearClassifier train_avg(const Matrix& X_raw, const WeakSignalSet& ws,
                           const SupervisedConfig& config) {
  return fit_supervised(X_raw, avg_pseudolabels(ws).probs(), config);
}

std::vector<ConditionalReference> reference_distributions(
    const std::vector<LabelDistribution>& signals, const Vector& labels) {
  std::vector<ConditionalReference> refs;
  refs.reserve(signals.size());
  for (const LabelDistribution& q : signals) {
    if (q.size() != labels.size()) {
      throw contract_error("reference_distributions: length mismatch");
    }
    ConditionalReference r;
    double high_sum = 0.0, low_sum = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      if (q[j] >= 0.5) {
        ++r.high_count;
        high_sum += labels[j];
      } else {
        ++r.low_count;
        low_sum += labels[j];
      }
    }
    r.high = r.high_count > 0 ? high_sum / static_cast<double>(r.high_count)
                              : 0.0;
    r.low = r.low_count > 0 ? low_sum / static_cast<double>(r.low_count) : 0.0;
    refs.push_back(r);
  }
  return refs;
}

std::vector<ConditionalReference> pseudo_reference_distributions(
    const std::vector<LabelDistribution>& signals) {
  if (signals.empty()) {
    throw contract_error("pseudo_reference_distributions: no signals");
  }
  Vector mean = Vector::Zero(signals.front().size());
  for (const LabelDistribution& q : signals) {
    if (q.size() != mean.size()) {
      throw contract_error("pseudo_reference_distributions: length mismatch");
    }
    mean += q.probs();
  }
  mean /= static_cast<double>(signals.size());
  return reference_distributions(signals, mean);
}

double model_conditional(const Vector& p, const LabelDistribution& q_k,
                         bool high_branch) {
  if (p.size() != q_k.size()) {
    throw contract_error("model_conditional: length mismatch");
  }
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const bool in_high = q_k[j] >= 0.5;
    if (in_high == high_branch) {
      sum += p[j];
      ++count;
    }
  }
  if (count == 0) throw contract_error("model_conditional: empty branch");
  return sum / static_cast<double>(count);
}

double bernoulli_kl(double ref, double model) {
  const double a = clamp_prob(ref);
  const double b = clamp_prob(model);
  return a * std::log(a / b) + (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
}

double ge_objective(const Vector& p,
                    const std::vector<LabelDistribution>& signals,
                    const std::vector<ConditionalReference>& refs) {
  double total = 0.0;
  for (const Branch& br : build_branches(signals, refs)) {
    if (!br.active) continue;
    total += bernoulli_kl(br.ref, branch_mean(p, br.members));
  }
  return total;
}

double ge_loss(const Vector& weights, const Matrix& X,
               const std::vector<LabelDistribution>& signals,
               const std::vector<ConditionalReference>& refs,
               double l2_strength) {
  const Vector p = sigmoid(with_bias(X) * weights);
  return ge_objective(p, signals, refs) +
         0.5 * l2_strength * weights.squaredNorm();
}

Vector ge_loss_gradient(const Vector& weights, const Matrix& X,
                        const std::vector<LabelDistribution>& signals,
                        const std::vector<ConditionalReference>& refs,
                        double l2_strength) {
  const Matrix Xb = with_bias(X);
  const Vector p = sigmoid(Xb * weights);
  const Vector dp = (p.array() * (1.0 - p.array())).matrix();

  Vector grad = l2_strength * weights;
  for (const Branch& br : build_branches(signals, refs)) {
    if (!br.active) continue;
    const double phat = branch_mean(p, br.members);
    if (phat <= kGeClampEps || phat >= 1.0 - kGeClampEps) continue;
    const double a = clamp_prob(br.ref);
    // d KL / d phat
    const double dkl = -a / phat + (1.0 - a) / (1.0 - phat);
    const double w = dkl / static_cast<double>(br.members.size());
    for (const Eigen::Index j : br.members) {
      grad += w * dp[j] * Xb.row(j).transpose();
    }
  }
  return grad;
}

LinearClassifier train_ge(const Matrix& X_raw,
                          const std::vector<LabelDistribution>& signals,
                          const std::vector<ConditionalReference>& refs,
                          const SupervisedConfig& config) {
  LinearClassifier c;
  c.scaler = StandardScaler::fit(X_raw);
  const Matrix X = c.scaler.transform(X_raw);

  Vector w = Vector::Zero(X.cols() + 1);
  for (int it = 0; it < config.max_iters; ++it) {
    const Vector grad =
        ge_loss_gradient(w, X, signals, refs, config.l2_strength);
    if (!grad.allFinite()) {
      throw training_error("train_ge: non-finite gradient");
    }
    if (grad.lpNorm<Eigen::Infinity>() < config.grad_tol) break;
    w -= config.step_size * grad;
  }
  if (!w.allFinite()) throw training_error("train_ge: diverged");
  c.weights = w;
  return c;
}

}  // namespace all

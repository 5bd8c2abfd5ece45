#include "all/models.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace all {

double sigmoid(double x) {
  double value;
  if (x >= 0.0) {
    const double e = std::exp(-x);
    value = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(x);
    value = e / (1.0 + e);
  }
  // Keep outputs strictly inside (0,1) even when exp underflows.
  constexpr double floor = std::numeric_limits<double>::min();
  const double ceiling = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::min(ceiling, std::max(floor, value));
}

Vector sigmoid(const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = sigmoid(x[j]);
  return out;
}

StandardScaler StandardScaler::fit(const Matrix& X) {
  StandardScaler s;
  const double n = static_cast<double>(X.rows());
  if (X.rows() == 0) throw contract_error("StandardScaler: empty matrix");
  s.mean = X.colwise().mean();
  s.scale.resize(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double var =
        (X.col(c).array() - s.mean[c]).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Matrix StandardScaler::transform(const Matrix& X) const {
  if (X.cols() != mean.size()) {
    throw contract_error("StandardScaler: feature count mismatch");
  }
  return (X.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

namespace {

// Features with the constant-1 bias column appended.
Matrix with_bias(const Matrix& X) {
  Matrix Xb(X.rows(), X.cols() + 1);
  Xb.leftCols(X.cols()) = X;
  Xb.col(X.cols()).setOnes();
  return Xb;
}

}  // namespace

void SigmoidLinearModel::set_params(const Vector& theta) {
  if (theta.size() != weights_.size()) {
    throw contract_error("SigmoidLinearModel: parameter size mismatch");
  }
  weights_ = theta;
}

Vector SigmoidLinearModel::predict(const Matrix& X) const {
  if (X.cols() + 1 != weights_.size()) {
    throw contract_error("SigmoidLinearModel: feature count mismatch");
  }
  return sigmoid(with_bias(X) * weights_);
}

Vector SigmoidLinearModel::jacobian_vector_product(const Matrix& X,
                                                   const Vector& v) const {
  if (v.size() != X.rows()) {
    throw contract_error("jacobian_vector_product: length mismatch");
  }
  const Matrix Xb = with_bias(X);
  const Vector p = sigmoid(Xb * weights_);
  // (dp/dtheta)' v = X~' (v .* p .* (1-p))
  const Vector w = v.array() * p.array() * (1.0 - p.array());
  return Xb.transpose() * w;
}

void DirectModel::set_params(const Vector& theta) {
  if (theta.size() != logits_.size()) {
    throw contract_error("DirectModel: parameter size mismatch");
  }
  logits_ = theta;
}

Vector DirectModel::predict(const Matrix& X) const {
  if (X.rows() != logits_.size()) {
    throw contract_error("DirectModel: row count mismatch");
  }
  return sigmoid(logits_);
}

Vector DirectModel::jacobian_vector_product(const Matrix& X,
                                            const Vector& v) const {
  if (v.size() != logits_.size() || X.rows() != logits_.size()) {
    throw contract_error("jacobian_vector_product: length mismatch");
  }
  const Vector p = sigmoid(logits_);
  return (p.array() * (1.0 - p.array()) * v.array()).matrix();
}

Vector fit_logistic(const Matrix& X, const Vector& targets,
                    const SupervisedConfig& config) {
  if (targets.size() != X.rows() || X.rows() == 0) {
    throw contract_error("fit_logistic: targets length != n");
  }
  const Matrix Xb = with_bias(X);
  const double n = static_cast<double>(X.rows());

  Vector w = Vector::Zero(Xb.cols());
  for (int it = 0; it < config.max_iters; ++it) {
    const Vector p = sigmoid(Xb * w);
    const Vector grad =
        Xb.transpose() * (p - targets) / n + config.l2_strength * w;
    if (!grad.allFinite()) {
      throw training_error("fit_logistic: non-finite gradient");
    }
    if (grad.lpNorm<Eigen::Infinity>() < config.grad_tol) break;
    w -= config.step_size * grad;
  }
  if (!w.allFinite()) throw training_error("fit_logistic: diverged");
  return w;
}

Vector LinearClassifier::predict_proba(const Matrix& X_raw) const {
  const Matrix Xs = scaler.transform(X_raw);
  return sigmoid(with_bias(Xs) * weights);
}

namespace {

void write_vector(std::ostream& out, const char* key, const Vector& v) {
  out << key << ' ' << v.size();
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < v.size(); ++j) out << ' ' << v[j];
  out << '\n';
}

Vector read_vector(std::istream& in, const std::string& expected_key) {
  std::string key;
  Eigen::Index len = 0;
  if (!(in >> key >> len) || key != expected_key || len < 0) {
    throw std::runtime_error("model record: expected field '" + expected_key +
                             "'");
  }
  Vector v(len);
  for (Eigen::Index j = 0; j < len; ++j) {
    if (!(in >> v[j])) {
      throw std::runtime_error("model record: truncated field '" +
                               expected_key + "'");
    }
  }
  return v;
}

}  // namespace

void LinearClassifier::save(std::ostream& out) const {
  out << "linear_model v1\n";
  write_vector(out, "weights", weights);
  write_vector(out, "scaler_mean", scaler.mean);
  write_vector(out, "scaler_scale", scaler.scale);
}

LinearClassifier LinearClassifier::load(std::istream& in) {
  std::string tag, version;
  in >> tag >> version;
  if (tag != "linear_model" || version != "v1") {
    throw std::runtime_error("model record: unrecognized header");
  }
  LinearClassifier c;
  c.weights = read_vector(in, "weights");
  c.scaler.mean = read_vector(in, "scaler_mean");
  c.scaler.scale = read_vector(in, "scaler_scale");
  if (c.weights.size() != c.scaler.mean.size() + 1 ||
      c.scaler.mean.size() != c.scaler.scale.size()) {
    throw std::runtime_error("model record: inconsistent field lengths");
  }
  return c;
}

void LinearClassifier::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

LinearClassifier LinearClassifier::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return LinearClassifier::load(in);
}

LinearClassifier fit_supervised(const Matrix& X_raw, const Vector& targets,
                                const SupervisedConfig& config) {
  LinearClassifier c;
  c.scaler = StandardScaler::fit(X_raw);
  c.weights = fit_logistic(c.scaler.transform(X_raw), targets, config);
  return c;
}

double accuracy(const Vector& probs, const Vector& labels) {
  if (probs.size() != labels.size() || probs.size() == 0) {
    throw contract_error("accuracy: length mismatch");
  }
  Eigen::Index hits = 0;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    const double pred = probs[j] >= 0.5 ? 1.0 : 0.0;
    if (pred == labels[j]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(probs.size());
}

}  // namespace all

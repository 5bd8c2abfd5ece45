#include "all/weak_supervision.hpp"

#include <iostream>

namespace all {

LabelDistribution WeakSignalModel::signal(const Matrix& X) const {
  if (feature_index < 0 || feature_index >= X.cols()) {
    throw contract_error("WeakSignalModel: feature index out of range");
  }
  return LabelDistribution(classifier.predict_proba(X.col(feature_index)));
}

WeakSignalModel fit_weak_signal(const Dataset& ws_split, int feature_index,
                                const SupervisedConfig& config) {
  if (!ws_split.true_labels) {
    throw contract_error("fit_weak_signal: weak-supervision split has no labels");
  }
  if (feature_index < 0 || feature_index >= ws_split.d()) {
    throw contract_error("fit_weak_signal: feature index out of range");
  }
  const Matrix col = ws_split.features.col(feature_index);
  const double spread = col.maxCoeff() - col.minCoeff();
  if (spread < 1e-12) {
    std::cerr << "warning: feature " << feature_index
              << " is constant on the weak-supervision split; signal reduces "
                 "to the class prior\n";
  }
  WeakSignalModel model;
  model.feature_index = feature_index;
  model.name = "ws_f" + std::to_string(feature_index);
  model.classifier = fit_supervised(col, *ws_split.true_labels, config);
  return model;
}

LabelDistribution make_weak_signal(const Dataset& ws_split,
                                   const Dataset& train_split,
                                   int feature_index,
                                   const SupervisedConfig& config) {
  return fit_weak_signal(ws_split, feature_index, config)
      .signal(train_split.features);
}

double true_error_bound(const LabelDistribution& q,
                        const LabelDistribution& labels) {
  return constraint_value(q, labels);
}

Vector fixed_bounds(Eigen::Index m, double value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw contract_error("fixed_bounds: value must lie in (0,1)");
  }
  return Vector::Constant(m, value);
}

}  // namespace all

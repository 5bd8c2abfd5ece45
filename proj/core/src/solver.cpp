#include "all/solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace all {

ConstraintCache::ConstraintCache(const WeakSignalSet& ws) {
  const Eigen::Index m = ws.m();
  const Eigen::Index n = ws.n();
  A.resize(m, n);
  offset.resize(m);
  const double dn = static_cast<double>(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector& q = ws.signal(i).probs();
    A.row(i) = (Vector::Ones(n) - 2.0 * q).transpose();
    offset[i] = q.sum() - dn * ws.bounds()[i];
  }
}

double lagrangian(const Vector& p, const Vector& y_hat, const Vector& gamma,
                  const WeakSignalSet& ws, double rho) {
  if (p.size() != y_hat.size()) {
    throw contract_error("lagrangian: p and y length mismatch");
  }
  if (gamma.size() != ws.m()) {
    throw contract_error("lagrangian: multiplier count != m");
  }
  double value = detail::disagreement(p, y_hat);
  const double dn = static_cast<double>(y_hat.size());
  for (Eigen::Index i = 0; i < ws.m(); ++i) {
    const Vector& q = ws.signal(i).probs();
    const double unnorm =
        q.sum() + (Vector::Ones(q.size()) - 2.0 * q).dot(y_hat) -
        dn * ws.bounds()[i];
    value -= gamma[i] * unnorm;
    const double hinge = std::max(0.0, unnorm);
    value -= 0.5 * rho * hinge * hinge;
  }
  return value;
}

Vector theta_step(const ParamModel& model, const Matrix& X,
                  const Vector& y_hat, double alpha) {
  const double n = static_cast<double>(y_hat.size());
  const Vector v = Vector::Ones(y_hat.size()) - 2.0 * y_hat;
  const Vector grad = model.jacobian_vector_product(X, v) / n;
  if (!grad.allFinite()) {
    throw training_error("theta_step: non-finite gradient");
  }
  return model.params() - alpha * grad;
}

Vector labels_step(const Vector& y_hat, const Vector& p,
                   const ConstraintCache& cons, const Vector& gamma,
                   double alpha, double rho) {
  const double n = static_cast<double>(y_hat.size());
  Vector grad = (Vector::Ones(p.size()) - 2.0 * p) / n;
  if (cons.A.rows() > 0) {
    const Vector viol = cons.violations(y_hat);
    grad -= cons.A.transpose() * (gamma + rho * viol.cwiseMax(0.0));
  }
  return (y_hat + alpha * grad).cwiseMin(1.0).cwiseMax(0.0);
}

Vector multipliers_step(const Vector& gamma, const Vector& y_hat,
                        const ConstraintCache& cons, double rho) {
  if (cons.A.rows() == 0) return gamma;
  return (gamma + rho * cons.violations(y_hat)).cwiseMax(0.0);
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "iteration,lagrangian,expected_error,max_violation,multiplier_inf\n";
  for (size_t i = 0; i < records.size(); ++i) {
    const TraceRecord& r = records[i];
    out << i + 1 << ',' << r.lagrangian << ',' << r.expected_error << ','
        << r.max_violation << ',' << r.multiplier_inf << '\n';
  }
}

TrainResult train(const Matrix& X, const WeakSignalSet& ws, ParamModel& model,
                  const SolverConfig& config) {
  const Eigen::Index n = X.rows();
  if (ws.m() == 0) throw contract_error("train: at least one weak signal");
  if (ws.n() != n) throw contract_error("train: signal length != n");
  if (config.rho <= 0.0 || config.step_size <= 0.0) {
    throw contract_error("train: rho and step size must be positive");
  }
  const double dn = static_cast<double>(n);

  // Algorithm start: adversarial labels at the signal mean, multipliers 0.
  Vector y_hat = Vector::Zero(n);
  for (Eigen::Index i = 0; i < ws.m(); ++i) y_hat += ws.signal(i).probs();
  y_hat /= static_cast<double>(ws.m());
  Vector gamma = Vector::Zero(ws.m());

  const ConstraintCache cons(ws);
  TrainResult result;
  result.trace.records.reserve(static_cast<size_t>(config.max_iters));

  double best_violation = std::numeric_limits<double>::infinity();
  int best_violation_iter = 0;

  for (int it = 1; it <= config.max_iters; ++it) {
    const double alpha = config.step_at(it);

    const Vector theta_prev = model.params();
    model.set_params(theta_step(model, X, y_hat, alpha));
    const Vector p = model.predict(X);

    const Vector y_prev = y_hat;
    y_hat = labels_step(y_hat, p, cons, gamma, alpha, config.rho);

    const Vector gamma_prev = gamma;
    gamma = multipliers_step(gamma, y_hat, cons, config.rho);

    const Vector viol = cons.violations(y_hat);
    const double max_violation =
        viol.size() > 0 ? viol.maxCoeff() / dn : 0.0;
    const double gamma_inf =
        gamma.size() > 0 ? gamma.lpNorm<Eigen::Infinity>() : 0.0;
    result.trace.records.push_back({lagrangian(p, y_hat, gamma, ws, config.rho),
                                    detail::disagreement(p, y_hat),
                                    max_violation, gamma_inf});
    result.iterations = it;

    const double delta =
        std::max({(model.params() - theta_prev).lpNorm<Eigen::Infinity>(),
                  (y_hat - y_prev).lpNorm<Eigen::Infinity>(),
                  (gamma - gamma_prev).lpNorm<Eigen::Infinity>()});
    if (delta < config.tol) {
      result.status = TrainStatus::Converged;
      break;
    }

    if (max_violation < best_violation - 1e-9) {
      best_violation = max_violation;
      best_violation_iter = it;
    }
    const bool stalled = it - best_violation_iter >= config.stall_window &&
                         best_violation > config.stall_violation;
    if (gamma_inf > config.multiplier_cap || stalled) {
      result.status = TrainStatus::Infeasible;
      break;
    }
  }

  result.adversarial = LabelDistribution(y_hat);
  result.multipliers = gamma;
  return result;
}

}  // namespace all

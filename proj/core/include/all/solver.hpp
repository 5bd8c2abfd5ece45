// Training loop for adversarial label learning: projected primal-dual
// subgradient descent on the augmented Lagrangian
//
//   L = expected_error(p(theta), y) - sum_i gamma_i (n cv_i - n b_i)
//       - (rho/2) sum_i [n cv_i - n b_i]_+^2,   gamma >= 0,
//
// with one iteration updating, in order: theta (descent on L), the
// predictions p, the adversarial labels y (projected ascent on L), and the
// multipliers (projected descent on L with the fixed step rho, so gamma
// grows while its constraint is violated and decays to the hinge at zero
// otherwise).
//
// Constraint terms are kept in unnormalized form, i.e. scaled by n relative
// to constraint_value; normalizing would silently rescale rho and gamma.

#pragma once

#include "all/models.hpp"
#include "all/types.hpp"

#include <iosfwd>

namespace all {

enum class StepSchedule { Constant, InvSqrt };

struct SolverConfig {
  double step_size = 0.01;  // alpha; 0.1 suits the direct parameterization
  StepSchedule schedule = StepSchedule::InvSqrt;
  double rho = 0.1;         // augmented-Lagrangian weight and multiplier step
  int max_iters = 10000;
  double tol = 1e-6;        // on max(|d theta|, |d y|, |d gamma|) per iteration

  // Infeasibility heuristic: abort when multipliers blow past the cap, or
  // when the best normalized constraint violation seen so far exceeds
  // stall_violation and has not improved for stall_window iterations.
  double multiplier_cap = 1e6;
  int stall_window = 1000;
  double stall_violation = 0.01;

  double step_at(int iteration) const {
    return schedule == StepSchedule::InvSqrt
               ? step_size / std::sqrt(static_cast<double>(iteration))
               : step_size;
  }
};

enum class TrainStatus { Converged, IterationLimit, Infeasible };

struct TraceRecord {
  double lagrangian;
  double expected_error;     // against the current adversarial labels
  double max_violation;      // max_i constraint_value_i - b_i (normalized)
  double multiplier_inf;     // |gamma|_inf
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  void write_csv(std::ostream& out) const;
};

struct TrainResult {
  TrainStatus status = TrainStatus::IterationLimit;
  int iterations = 0;
  LabelDistribution adversarial;
  Vector multipliers;
  TrainTrace trace;
};

// Precomputed constraint geometry: row i holds 1 - 2 q_i, and offset_i is
// sum(q_i) - n b_i, so the unnormalized violation vector is A y + offset.
struct ConstraintCache {
  Matrix A;
  Vector offset;

  explicit ConstraintCache(const WeakSignalSet& ws);
  Vector violations(const Vector& y) const {
    return A.rows() > 0 ? Vector(A * y + offset) : Vector(0);
  }
};

// Augmented Lagrangian
//   L = expected_error(p, y) - sum_i gamma_i (n cv_i - n b_i)
//       - (rho/2) sum_i [n cv_i - n b_i]_+^2.
double lagrangian(const Vector& p, const Vector& y_hat, const Vector& gamma,
                  const WeakSignalSet& ws, double rho);

// theta <- theta - (alpha/n) (dp/dtheta)' (1 - 2 y). Returns updated params.
Vector theta_step(const ParamModel& model, const Matrix& X,
                  const Vector& y_hat, double alpha);

// y <- clip_[0,1]( y + alpha ( (1/n)(1-2p) - A'(gamma + rho [A y + off]_+) ) ).
Vector labels_step(const Vector& y_hat, const Vector& p,
                   const ConstraintCache& cons, const Vector& gamma,
                   double alpha, double rho);

// gamma_i <- [ gamma_i + rho (A y + off)_i ]_+.
Vector multipliers_step(const Vector& gamma, const Vector& y_hat,
                        const ConstraintCache& cons, double rho);

// Runs the full loop, mutating the model parameters in place. Initialization:
// theta as passed in (zeros by default), adversarial labels at the mean of
// the weak signals, multipliers at zero.
TrainResult train(const Matrix& X, const WeakSignalSet& ws, ParamModel& model,
                  const SolverConfig& config = {});

}  // namespace all

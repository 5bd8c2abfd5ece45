// Exact solver for the adversary's inner problem: find the probabilistic
// labeling, feasible under every weak-signal error bound, that maximizes the
// expected error of the given predictions. The maximized value is the primal
// objective g and upper-bounds the true error whenever the bounds hold.
//
// This is a diagnostic/test path; the training loop in solver.hpp never waits
// for an exact inner solve.

#pragma once

#include "all/types.hpp"

namespace all {

enum class OracleStatus { Optimal, Infeasible };

struct OracleResult {
  OracleStatus status = OracleStatus::Infeasible;
  LabelDistribution labels;  // maximizing labeling, valid when Optimal
  double value = 0.0;        // expected_error(p, labels)
};

// Maximizes expected_error(p, y) over y in [0,1]^n subject to
// constraint_value(q_i, y) <= b_i for every signal. Returns a vertex-optimal
// solution; ties are broken deterministically (see simplex.hpp). An empty
// constraint polytope yields status Infeasible rather than an exception.
OracleResult solve_exact(const LabelDistribution& p, const WeakSignalSet& ws);

// solve_exact(...).value, throwing infeasibility_error when the polytope is
// empty.
double primal_value(const LabelDistribution& p, const WeakSignalSet& ws);

class infeasibility_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// True when the weak-signal constraint polytope admits at least one labeling.
bool bounds_feasible(const WeakSignalSet& ws);

}  // namespace all

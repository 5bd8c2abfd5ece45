// Dense two-phase primal simplex for box-constrained linear programs:
//
//   maximize c'x  subject to  A x <= u,  0 <= x <= 1.
//
// Sized for the small instances the adversarial oracle deals with (tableau is
// (n+m) x (2n+m) dense). Bland's rule guarantees termination; ties among
// optimal vertices are broken deterministically, biased toward the
// lexicographically smallest solution by an infinitesimal objective
// perturbation.

#pragma once

#include "all/types.hpp"

namespace all::lp {

enum class Status { Optimal, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  Vector x;       // vertex solution, valid when status == Optimal
  double value = 0.0;  // c'x at the solution (unperturbed objective)
};

// Solves max c'x s.t. A x <= u, 0 <= x <= 1. A may have zero rows.
Result maximize_over_unit_box(const Vector& c, const Matrix& A,
                              const Vector& u);

// Phase-1 only: is {x in [0,1]^n : A x <= u} non-empty?
bool box_polytope_feasible(const Matrix& A, const Vector& u);

}  // namespace all::lp

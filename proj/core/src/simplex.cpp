#include "all/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace all::lp {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Dense tableau: rows = constraints, one extra row for the objective.
// Column layout: [structural + slack variables | artificials | rhs].
struct Tableau {
  Matrix t;                 // (M+1) x (N + art + 1)
  std::vector<int> basis;   // basic variable per row
  int M, N, n_art;

  double& rhs(int r) { return t(r, t.cols() - 1); }
  double& obj(int j) { return t(M, j); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int r = 0; r <= M; ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (std::abs(f) > 0.0) t.row(r) -= f * t.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  }

  // Primal simplex with Bland's rule on the current objective row.
  // Columns in [0, limit) are eligible to enter. Returns false on
  // unboundedness (cannot happen for the box problems we build).
  bool run(int limit) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (obj(j) > kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < M; ++r) {
        const double a = t(r, enter);
        if (a > kPivotTol) {
          const double ratio = rhs(r) / a;
          if (ratio < best - kPivotTol ||
              (ratio < best + kPivotTol && leave >= 0 &&
               basis[static_cast<size_t>(r)] <
                   basis[static_cast<size_t>(leave)])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

// Builds the phase-1 tableau for max c'x, A x <= u, 0 <= x <= 1 and drives
// out infeasibility. Returns false when the polytope is empty.
bool phase1(const Matrix& A, const Vector& u, Tableau& tab) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  const int M = m + n;           // inequality rows + upper-bound rows
  const int N = n + m + n;       // x, inequality slacks, bound slacks

  // Count artificials: one per row whose rhs is negative before slack basis.
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (u[i] < 0.0) ++n_art;
  }

  tab.M = M;
  tab.N = N;
  tab.n_art = n_art;
  tab.t = Matrix::Zero(M + 1, N + n_art + 1);
  tab.basis.assign(static_cast<size_t>(M), -1);

  int art = 0;
  for (int i = 0; i < m; ++i) {
    const double sign = u[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.t(i, j) = sign * A(i, j);
    tab.t(i, n + i) = sign;  // inequality slack
    tab.rhs(i) = sign * u[i];
    if (u[i] < 0.0) {
      tab.t(i, N + art) = 1.0;
      tab.basis[static_cast<size_t>(i)] = N + art;
      ++art;
    } else {
      tab.basis[static_cast<size_t>(i)] = n + i;
    }
  }
  for (int j = 0; j < n; ++j) {
    const int r = m + j;
    tab.t(r, j) = 1.0;
    tab.t(r, n + m + j) = 1.0;  // bound slack
    tab.rhs(r) = 1.0;
    tab.basis[static_cast<size_t>(r)] = n + m + j;
  }

  if (n_art == 0) return true;

  // Phase-1 objective: maximize -sum(artificials); price out basic ones.
  for (int j = 0; j < n_art; ++j) tab.obj(N + j) = -1.0;
  for (int r = 0; r < M; ++r) {
    if (tab.basis[static_cast<size_t>(r)] >= N) tab.t.row(M) += tab.t.row(r);
  }

  tab.run(N + n_art);
  // The objective cell tracks -z, so at the phase-1 optimum it holds the
  // residual infeasibility min sum(artificials) directly.
  const double infeas = tab.t(M, tab.t.cols() - 1);
  if (infeas > kFeasTol) return false;

  // Pivot any lingering artificial out of the basis; an all-zero row is a
  // redundant constraint and can stay (its basic artificial is zero).
  for (int r = 0; r < M; ++r) {
    if (tab.basis[static_cast<size_t>(r)] >= N) {
      for (int j = 0; j < N; ++j) {
        if (std::abs(tab.t(r, j)) > kPivotTol) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }
  return true;
}

}  // namespace

Result maximize_over_unit_box(const Vector& c, const Matrix& A,
                              const Vector& u) {
  const int n = static_cast<int>(c.size());
  if (A.rows() != u.size() || (A.rows() > 0 && A.cols() != n)) {
    throw contract_error("maximize_over_unit_box: dimension mismatch");
  }

  Tableau tab;
  if (!phase1(A, u, tab)) return {Status::Infeasible, Vector(), 0.0};

  // Phase 2: real objective with a tiny decreasing perturbation that prefers
  // lexicographically smaller vertices among exact ties.
  const double scale = 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff());
  tab.t.row(tab.M).setZero();
  for (int j = 0; j < n; ++j) {
    tab.obj(j) = c[j] - scale * static_cast<double>(n - j) /
                            static_cast<double>(n);
  }
  // Price out the current basis.
  for (int r = 0; r < tab.M; ++r) {
    const int b = tab.basis[static_cast<size_t>(r)];
    const double coef = tab.t(tab.M, b);
    if (std::abs(coef) > 0.0) tab.t.row(tab.M) -= coef * tab.t.row(r);
  }

  if (!tab.run(tab.N)) {
    throw std::logic_error("simplex: unbounded box problem");
  }

  Vector x = Vector::Zero(n);
  for (int r = 0; r < tab.M; ++r) {
    const int b = tab.basis[static_cast<size_t>(r)];
    if (b < n) x[b] = std::min(1.0, std::max(0.0, tab.rhs(r)));
  }
  return {Status::Optimal, x, c.dot(x)};
}

bool box_polytope_feasible(const Matrix& A, const Vector& u) {
  Tableau tab;
  return phase1(A, u, tab);
}

}  // namespace all::lp

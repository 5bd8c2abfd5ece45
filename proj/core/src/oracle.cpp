#include "all/oracle.hpp"

#include "all/simplex.hpp"

namespace all {
namespace {

// The box LP in explicit form. Writing e = expected_error(p, y):
//   n * e = sum(p) + (1 - 2p)'y,
// so the objective gradient is c = (1/n)(1 - 2p). Constraint i becomes
//   (1 - 2q_i)'y <= n*b_i - sum(q_i).
struct BoxLp {
  Vector c;
  Matrix A;
  Vector u;
  double constant;  // (1/n) sum(p)
};

BoxLp build_lp(const LabelDistribution& p, const WeakSignalSet& ws) {
  const auto n = p.size();
  if (n == 0) throw contract_error("solve_exact: empty predictions");
  if (ws.m() > 0 && ws.n() != n) {
    throw contract_error("solve_exact: signal length != predictions length");
  }
  const double dn = static_cast<double>(n);

  BoxLp lp;
  lp.c = (Vector::Ones(n) - 2.0 * p.probs()) / dn;
  lp.constant = p.probs().sum() / dn;
  lp.A.resize(ws.m(), n);
  lp.u.resize(ws.m());
  for (Eigen::Index i = 0; i < ws.m(); ++i) {
    const Vector& q = ws.signal(i).probs();
    lp.A.row(i) = (Vector::Ones(n) - 2.0 * q).transpose();
    lp.u[i] = dn * ws.bounds()[i] - q.sum();
  }
  return lp;
}

}  // namespace

OracleResult solve_exact(const LabelDistribution& p, const WeakSignalSet& ws) {
  const BoxLp lp = build_lp(p, ws);
  const lp::Result r = lp::maximize_over_unit_box(lp.c, lp.A, lp.u);
  if (r.status == lp::Status::Infeasible) {
    return {OracleStatus::Infeasible, LabelDistribution(), 0.0};
  }
  OracleResult out;
  out.status = OracleStatus::Optimal;
  out.labels = LabelDistribution(r.x);
  out.value = expected_error(p, out.labels);
  return out;
}

double primal_value(const LabelDistribution& p, const WeakSignalSet& ws) {
  const OracleResult r = solve_exact(p, ws);
  if (r.status == OracleStatus::Infeasible) {
    throw infeasibility_error(
        "primal_value: weak-signal constraint polytope is empty");
  }
  return r.value;
}

bool bounds_feasible(const WeakSignalSet& ws) {
  if (ws.m() == 0) return true;
  LabelDistribution p(Vector::Constant(ws.n(), 0.5));
  const BoxLp lp = build_lp(p, ws);
  return lp::box_polytope_feasible(lp.A, lp.u);
}

}  // namespace all

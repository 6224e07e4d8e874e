#pragma once

#include <limits>

#include <Eigen/Core>

namespace oactl {

/// minimize c.x  s.t.  A_ub x <= b_ub,  A_eq x == b_eq,  lower <= x <= upper.
/// Bounds may be infinite. Empty matrices are fine (0 rows, n cols).
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// n variables, no constraints, x >= 0.
  static LinearProgram with_variables(Eigen::Index n);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

/// Dense two-phase tableau simplex. Dantzig pricing with a Bland fallback
/// on degenerate stalls.
/// Meant for small problems (a few hundred columns).
LpResult solve_lp(const LinearProgram& lp, int max_iterations = 20000);

}  // namespace oactl

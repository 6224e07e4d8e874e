#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace oactl {

/// minimize ||A x - b||^2  s.t.  lower <= x <= upper,  C x <= d.
///
/// Infinite bounds mean "unbounded" and never enter the active set. A must
/// have full column rank. The warm start is projected onto the feasible set
/// when it is not already feasible.
struct WlsProblem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd c;  // p x n, may have zero rows
  Eigen::VectorXd d;
  std::optional<Eigen::VectorXd> warm_start;
  int max_iterations = 100;

  /// Unconstrained problem with infinite bounds and no inequality rows.
  static WlsProblem least_squares(Eigen::MatrixXd a, Eigen::VectorXd b);

  Eigen::Index variables() const { return a.cols(); }
  double objective(const Eigen::VectorXd& x) const { return (a * x - b).squaredNorm(); }
};

enum class WlsStatus { kOptimal, kMaxIterations, kInfeasible };

const char* to_string(WlsStatus status);

/// Constraint indices are ordered: lower bounds [0, n), upper bounds [n, 2n),
/// general rows [2n, 2n + p).
struct ActiveConstraint {
  enum class Kind { kLower, kUpper, kGeneral } kind;
  Eigen::Index index;  // variable index or row of C
  double multiplier = 0.0;
};

struct WlsSolution {
  WlsStatus status = WlsStatus::kInfeasible;
  Eigen::VectorXd x;
  std::vector<ActiveConstraint> active;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Primal active-set solver. Each equality-constrained subproblem is solved
/// through a null-space QR. Holds scratch storage; one instance per thread.
class WlsSolver {
 public:
  WlsSolution solve(const WlsProblem& problem);

  /// Objective value after each accepted iterate of the last solve.
  const std::vector<double>& objective_trace() const { return trace_; }
  void set_record_trace(bool on) { record_trace_ = on; }

 private:
  struct Row {
    Eigen::RowVectorXd g;
    double h;
    ActiveConstraint::Kind kind;
    Eigen::Index index;
  };

  void build_rows(const WlsProblem& problem);
  std::optional<Eigen::VectorXd> feasible_start(const WlsProblem& problem) const;

  std::vector<Row> rows_;
  std::vector<double> trace_;
  bool record_trace_ = false;
};

/// Largest constraint violation of x (0 when feasible).
double max_violation(const WlsProblem& problem, const Eigen::VectorXd& x);

/// Enumerates every subset of constraints as equalities, keeps the feasible
/// KKT points and returns the best. Throws std::length_error beyond n > 8 or
/// more than 20 finite constraints.
WlsSolution brute_force_oracle(const WlsProblem& problem);

}  // namespace oactl
